"""Seed hypersurfaces with closed-form pointwise data.

Every hypersurface is addressed through *parameters*: an opaque value
``p`` understood by the hypersurface itself (a unit direction at the
center for a geodesic sphere, a point of the base hyperplane for an
equidistant, ...). ``local_chart(p)`` returns a smooth local chart
``t -> p'`` with value ``p`` at ``t = 0``, which is what the
finite-difference oracle differentiates; ``local_param(p, t)`` evaluates
it once.

Sign conventions: the shape operator is ``A X = -(grad_X N)^T`` and the
catalog normals point toward the focal set (the center of a geodesic
sphere, the ideal point of a horosphere, the base hyperplane of an
equidistant), so the catalog principal curvatures are nonnegative.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import GeometryError
from .matfun import SpectralData, joint_eigenspaces
from .spaceform import SpaceForm

ON_SURFACE_TOL = 1e-10


@dataclass(frozen=True)
class HypersurfacePointData:
    """Everything known at one point of a hypersurface.

    ``frame`` holds an orthonormal basis of the tangent space as columns
    (ambient coordinates); ``shape`` and ``normal_jacobi`` are expressed
    in that frame.
    """

    point: np.ndarray
    frame: np.ndarray
    normal: np.ndarray
    shape: np.ndarray
    normal_jacobi: np.ndarray
    spectra: SpectralData


class Hypersurface:
    """Oriented curvature-adapted hypersurface of ``self.ambient``."""

    ambient = None

    @property
    def dim(self):
        return self.ambient.dim - 1

    def base_param(self):
        raise NotImplementedError

    def local_chart(self, p):
        raise NotImplementedError

    def local_param(self, p, t):
        return self.local_chart(p)(np.asarray(t, dtype=float))

    def sample_param(self, rng):
        raise NotImplementedError

    def embed(self, p):
        raise NotImplementedError

    def normal(self, p):
        raise NotImplementedError

    def point_data(self, p) -> HypersurfacePointData:
        raise NotImplementedError

    def normal_offset(self, p, r):
        """``exp(r N_p)``: the point at signed distance ``r`` along the normal."""
        return self.ambient.geodesic(self.embed(p), self.normal(p), r)

    def chart(self, p):
        """Local immersion ``t -> embed(local_chart(p)(t))`` around ``p``."""
        loc = self.local_chart(p)
        return lambda t: self.embed(loc(np.asarray(t, dtype=float)))


class _UmbilicSeed(Hypersurface):
    """Catalog seed in a space form with ``A = lam * I``."""

    ambient: SpaceForm
    lam: float

    def point_data(self, p):
        x = self.embed(p)
        n = self.normal(p)
        frame = self.ambient.tangent_frame(x, exclude=[n])
        shape = self.lam * np.eye(self.dim)
        jac = self.ambient.curvature * np.eye(self.dim)  # R(v, n)n = c v for unit n
        return HypersurfacePointData(x, frame, n, shape, jac, joint_eigenspaces(shape, jac))


def _require_spaceform(ambient, kinds, what):
    if not isinstance(ambient, SpaceForm) or ambient.kind not in kinds:
        raise ValueError(f"{what} requires a {' or '.join(kinds)} space form, got {ambient}")
    if ambient.dim < 2:
        raise ValueError(f"{what} needs ambient dimension >= 2")


class GeodesicSphere(_UmbilicSeed):
    """Geodesic sphere of radius ``radius`` about ``center``, inward normal.

    Parameter: a unit tangent vector ``w`` at the center; the point is
    ``exp_center(radius * w)``. Principal curvature
    ``fcos(c, r) / fsinc(c, r)`` (``sqrt(c) cot(sqrt(c) r)``, ``1/r`` or
    ``sqrt(-c) coth(sqrt(-c) r)``).
    """

    kind = "geodesic_sphere"

    def __init__(self, ambient, radius, center=None):
        _require_spaceform(ambient, ("sphere", "hyperbolic", "euclidean"), "geodesic sphere")
        r = float(radius)
        if not r > 0:
            raise ValueError(f"geodesic sphere radius must be positive, got {r}")
        if ambient.kind == "sphere" and not r < math.pi * ambient.radius:
            raise ValueError(
                f"geodesic sphere radius must lie in (0, pi/sqrt(c)) = (0, {math.pi * ambient.radius:.6g}), got {r}"
            )
        self.ambient = ambient
        self.radius = r
        self.center = ambient.check_point(ambient.base_point() if center is None else center)
        c = ambient.curvature
        self.lam = kernels.fcos(c, r) / kernels.fsinc(c, r)

    def _check_dir(self, w):
        w = self.ambient.check_tangent(self.center, w)
        if abs(self.ambient.inner(w, w) - 1.0) > 1e-8:
            raise GeometryError("geodesic sphere parameter must be a unit vector at the center")
        return w

    def base_param(self):
        return self.ambient.tangent_frame(self.center)[:, 0]

    def sample_param(self, rng):
        return self.ambient.random_tangent(self.center, rng)

    def local_chart(self, w):
        E = self.ambient.tangent_frame(self.center, exclude=[w])

        def chart(t):
            v = w + E @ t
            return v / self.ambient.norm(v)
        return chart

    def embed(self, w):
        return self.ambient.geodesic(self.center, self._check_dir(w), self.radius)

    def normal(self, w):
        return -self.ambient.velocity(self.center, self._check_dir(w), self.radius)

    def locate(self, x):
        """Parameter of an ambient point on the sphere."""
        X = self.ambient
        x = X.check_point(x)
        dist = X.distance(self.center, x)
        if abs(dist - self.radius) > ON_SURFACE_TOL * max(1.0, self.radius):
            raise GeometryError(
                f"point is off the geodesic sphere: distance to center {dist:.12g}, radius {self.radius:.12g}"
            )
        w = X.project(self.center, x - self.center)
        return w / X.norm(w)


class _HyperplaneOffset(_UmbilicSeed):
    """Parallel hypersurface at signed distance ``d`` from the totally
    geodesic hyperplane ``{<y, a> = 0}`` through the base point.

    Parameter: a point ``y`` of the hyperplane. The normal points back
    toward the hyperplane, giving ``lam = -c fsinc(c, d) / fcos(c, d)``.
    """

    def _setup(self, ambient, distance, axis):
        self.ambient = ambient
        self.distance = float(distance)
        o = ambient.base_point()
        if axis is None:
            a = np.zeros(ambient.ambient_dim)
            a[-1] = 1.0
        else:
            a = ambient.check_tangent(o, axis)
            if abs(ambient.inner(a, a) - 1.0) > 1e-8:
                raise ValueError("hyperplane axis must be a unit tangent vector at the base point")
        self.axis = a
        c = ambient.curvature
        d = self.distance
        self._fc = kernels.fcos(c, d)
        self._fs = kernels.fsinc(c, d)
        self.lam = -c * self._fs / self._fc + 0.0  # no signed zero

    def _check_base(self, y):
        y = self.ambient.check_point(y)
        if abs(self.ambient.inner(y, self.axis)) > 1e-8:
            raise GeometryError("parameter is not on the base hyperplane")
        return y

    def base_param(self):
        return self.ambient.base_point()

    def local_chart(self, y):
        E = self.ambient.tangent_frame(y, exclude=[self.axis])
        return lambda t: self.ambient.geodesic(y, E @ t, 1.0)

    def sample_param(self, rng):
        return self.local_param(self.base_param(), rng.standard_normal(self.dim))

    def embed(self, y):
        return self.ambient.geodesic(self._check_base(y), self.axis, self.distance)

    def normal(self, y):
        return -self.ambient.velocity(self._check_base(y), self.axis, self.distance)

    def locate(self, x):
        X = self.ambient
        x = X.check_point(x)
        res = abs(X.inner(x, self.axis) - self._fs)
        if res > ON_SURFACE_TOL:
            raise GeometryError(f"point is off the hypersurface: level residual {res:.3e}")
        return (x - self._fs * self.axis) / self._fc


class Equator(_HyperplaneOffset):
    """Totally geodesic hyperplane (the equator of a sphere); ``lam = 0``."""

    kind = "equator"

    def __init__(self, ambient, axis=None):
        _require_spaceform(ambient, ("sphere", "hyperbolic", "euclidean"), "equator")
        self._setup(ambient, 0.0, axis)


class Equidistant(_HyperplaneOffset):
    """Equidistant hypersurface in hyperbolic space; ``lam = sqrt(-c) tanh(sqrt(-c) d)``."""

    kind = "equidistant"

    def __init__(self, ambient, distance, axis=None):
        _require_spaceform(ambient, ("hyperbolic",), "equidistant")
        if not float(distance) > 0:
            raise ValueError(f"equidistant distance must be positive, got {distance}")
        self._setup(ambient, distance, axis)


class Horosphere(_UmbilicSeed):
    """Horosphere ``{<x, l>_L = -R}`` with ``l = (1, xi)`` null, ``R = 1/sqrt(-c)``.

    Parameter: the point itself. The normal ``l - x/R`` points to the ideal
    point ``xi``; ``lam = 1/R``. The chart
    ``x + E t + |t|^2/(2R) l`` stays exactly on the horosphere.
    """

    kind = "horosphere"

    def __init__(self, ambient, direction=None):
        _require_spaceform(ambient, ("hyperbolic",), "horosphere")
        if direction is None:
            xi = np.zeros(ambient.dim)
            xi[-1] = 1.0
        else:
            xi = np.asarray(direction, dtype=float)
            if xi.shape != (ambient.dim,) or not np.linalg.norm(xi) > 0:
                raise ValueError(f"horosphere direction must be a nonzero vector of length {ambient.dim}")
            xi = xi / np.linalg.norm(xi)
        self.ambient = ambient
        self.direction = xi
        self.R = ambient.radius
        self.ideal = np.concatenate([[1.0], xi])
        self.lam = 1.0 / self.R

    def _check(self, x):
        x = self.ambient.check_point(x)
        res = abs(self.ambient.inner(x, self.ideal) + self.R) / self.R
        if res > 1e-8:
            raise GeometryError(f"point is off the horosphere: level residual {res:.3e}")
        return x

    def base_param(self):
        return self.ambient.base_point()

    def local_chart(self, x):
        E = self.ambient.tangent_frame(x, exclude=[self.normal(x)])
        return lambda t: x + E @ t + (t @ t) / (2.0 * self.R) * self.ideal

    def sample_param(self, rng):
        return self.local_param(self.base_param(), self.R * rng.standard_normal(self.dim))

    def embed(self, x):
        return self._check(x)

    def normal(self, x):
        return self.ideal - self._check(x) / self.R

    def locate(self, x):
        x = self.ambient.check_point(x)
        res = abs(self.ambient.inner(x, self.ideal) + self.R) / self.R
        if res > ON_SURFACE_TOL:
            raise GeometryError(f"point is off the horosphere: level residual {res:.3e}")
        return x


SEED_KINDS = {
    "geodesic_sphere": GeodesicSphere,
    "horosphere": Horosphere,
    "equidistant": Equidistant,
    "equator": Equator,
}


def seed(kind, ambient, **params):
    """Build a catalog seed by name, e.g. ``seed("geodesic_sphere", X, radius=0.5)``."""
    try:
        cls = SEED_KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown seed kind {kind!r}; expected one of {sorted(SEED_KINDS)}") from None
    return cls(ambient, **params)


def point_data(H, p):
    return H.point_data(p)


def normal_offset(H, p, r):
    return H.normal_offset(p, r)
