"""Tube-like hypersurfaces ``M1 x M2 x S^1`` in a product ``X1 x X2``.

Given oriented curvature-adapted hypersurfaces ``M1`` in ``X1`` and ``M2``
in ``X2`` and a small closed plane curve ``u = (u1, u2)`` winding once
around the origin, the map

    f(p1, p2, theta) = (exp(u1(theta) N1(p1)), exp(u2(theta) N2(p2)))

is a curvature-adapted hypersurface of the product. Its principal
curvatures and normal Jacobi eigenvalues follow, row by row, from the
seeds' common eigenpairs ``(lam, mu)``:

=========  =====================================  ==========================
row        shape eigenvalue                       normal Jacobi eigenvalue
=========  =====================================  ==========================
``E1``     ``rho1 * ratio(lam, mu, u1)``          ``rho1**2 * mu``
``E2``     ``rho2 * ratio(lam, mu, u2)``          ``rho2**2 * mu``
``theta``  signed curvature of the plane curve    ``0``
=========  =====================================  ==========================

with ``(rho1, rho2) = (-u2', u1') / |u'|`` and
``ratio = (mu fsinc + lam fcos) / (fcos - lam fsinc)`` evaluated at the
factor offset (see :func:`curvadapt.kernels.offset_shape`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.integrate import trapezoid

from . import kernels
from .errors import CurveValidationError, FocalPointError
from .hypersurface import Hypersurface, HypersurfacePointData
from .matfun import joint_eigenspaces, spectral_cos, spectral_sinc
from .spaceform import ProductSpace

TWO_PI = 2.0 * math.pi
FOCAL_GUARD = 1e-10
ADMISSIBLE_FACTOR = 0.9
WINDING_SAMPLES = 4096


# ---------------------------------------------------------------------------
# profile curves


@dataclass(frozen=True)
class ProfileCurve:
    """Closed plane curve ``u(theta)`` with analytic first and second derivatives.

    Every kind is stored as a finite Fourier series per component: rows
    ``(k, a_k, b_k)`` meaning ``a_k cos(k theta) + b_k sin(k theta)``.
    ``reversed_`` traverses the curve as ``theta -> 2 pi - theta``.
    """

    kind: str
    params: dict
    u1_terms: tuple
    u2_terms: tuple
    reversed_: bool = False

    def _eval(self, terms, theta, order):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros_like(theta)
        for k, a, b in terms:
            c, s = np.cos(k * theta), np.sin(k * theta)
            if order == 0:
                out = out + a * c + b * s
            elif order == 1:
                out = out + k * (-a * s + b * c)
            else:
                out = out - k * k * (a * c + b * s)
        return out

    def _component(self, order, theta):
        theta = np.asarray(theta, dtype=float)
        if self.reversed_:
            th = TWO_PI - theta
            sign = -1.0 if order == 1 else 1.0
        else:
            th, sign = theta, 1.0
        return sign * np.array([self._eval(self.u1_terms, th, order), self._eval(self.u2_terms, th, order)])

    def u(self, theta):
        return self._component(0, theta)

    def du(self, theta):
        return self._component(1, theta)

    def ddu(self, theta):
        return self._component(2, theta)

    def reversed(self):
        return ProfileCurve(self.kind, self.params, self.u1_terms, self.u2_terms, not self.reversed_)

    def max_radius(self, samples=WINDING_SAMPLES):
        th = np.linspace(0.0, TWO_PI, samples, endpoint=False)
        return float(np.max(np.hypot(*self.u(th))))


def _terms(rows):
    out = []
    for row in rows:
        k, a, b = row
        if int(k) != k or k < 0:
            raise ValueError(f"Fourier mode must be a nonnegative integer, got {k}")
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError("Fourier coefficients must be finite")
        out.append((int(k), float(a), float(b)))
    return tuple(out)


def make_curve(kind, **params):
    """``circle(radius)``, ``ellipse(a, b)`` or ``fourier(u1=rows, u2=rows)``."""
    if kind == "circle":
        r = float(params["radius"])
        return ProfileCurve(kind, {"radius": r}, ((1, r, 0.0),), ((1, 0.0, r),))
    if kind == "ellipse":
        a, b = float(params["a"]), float(params["b"])
        return ProfileCurve(kind, {"a": a, "b": b}, ((1, a, 0.0),), ((1, 0.0, b),))
    if kind == "fourier":
        u1, u2 = _terms(params["u1"]), _terms(params["u2"])
        return ProfileCurve(kind, {"u1": u1, "u2": u2}, u1, u2)
    raise ValueError(f"unknown curve kind {kind!r}")


def focal_radius(lam, mu):
    """Distance to the nearest focal point along ``+-N`` for the eigenpair ``(lam, mu)``."""
    return kernels.focal_radius(float(lam), float(mu))


class FocalRow(NamedTuple):
    factor: int
    sample: int
    lam: float
    mu: float
    multiplicity: int
    focal_radius: float


def focal_table(m1, m2, budget=16, seed=0):
    """Focal radii of every seed eigenpair at ``budget`` points per factor.

    The first sample of each factor is its base parameter; the rest come
    from a fixed-seed generator, so the table is deterministic.
    """
    rows = []
    for i, m in ((1, m1), (2, m2)):
        rng = np.random.Generator(np.random.Philox(seed + i))
        for k in range(budget):
            p = m.base_param() if k == 0 else m.sample_param(rng)
            for pair in m.point_data(p).spectra:
                rows.append(FocalRow(i, k, pair.lam, pair.mu, pair.multiplicity, focal_radius(pair.lam, pair.mu)))
    return rows


def admissible_radius(m1, m2, budget=16):
    """``0.9 * inf`` of sampled focal radii; curves must stay strictly inside."""
    return ADMISSIBLE_FACTOR * min(r.focal_radius for r in focal_table(m1, m2, budget))


@dataclass
class CurveDiagnostics:
    closure_residual: float
    min_speed: float
    min_radius: float
    max_radius: float
    winding: int
    focal_bound: float = math.inf
    admissible: float = math.inf

    @property
    def margin(self):
        return self.admissible - self.max_radius


def curve_diagnostics(curve, m1=None, m2=None, samples=WINDING_SAMPLES, budget=16):
    th = np.linspace(0.0, TWO_PI, samples + 1)
    u, du = curve.u(th), curve.du(th)
    closure = max(
        float(np.max(np.abs(f(0.0) - f(TWO_PI)))) for f in (curve.u, curve.du, curve.ddu)
    )
    r2 = u[0] ** 2 + u[1] ** 2
    speed = np.hypot(*du)
    with np.errstate(divide="ignore", invalid="ignore"):
        dphi = (u[0] * du[1] - u[1] * du[0]) / r2
    turns = trapezoid(dphi, th) / TWO_PI if np.all(r2 > 0) else math.nan
    diag = CurveDiagnostics(
        closure_residual=closure,
        min_speed=float(speed.min()),
        min_radius=float(np.sqrt(r2.min())),
        max_radius=float(np.sqrt(r2.max())),
        winding=int(round(turns)) if math.isfinite(turns) else 0,
    )
    if m1 is not None and m2 is not None:
        diag.focal_bound = min(r.focal_radius for r in focal_table(m1, m2, budget))
        diag.admissible = ADMISSIBLE_FACTOR * diag.focal_bound
    return diag


def validate_curve(curve, m1=None, m2=None, samples=WINDING_SAMPLES, budget=16):
    """Check closure, regularity, winding and size; return the diagnostics.

    Raises
    ------
    CurveValidationError
        Naming the first failing quantity.
    """
    d = curve_diagnostics(curve, m1, m2, samples, budget)
    if d.closure_residual > 1e-9:
        raise CurveValidationError(f"curve is not closed to second order: seam residual {d.closure_residual:.3e}")
    if not d.min_speed > 1e-12:
        raise CurveValidationError(f"curve is not regular: min |u'| = {d.min_speed:.3e}")
    if not d.min_radius > 1e-9 * d.max_radius:
        raise CurveValidationError(f"curve passes through the origin: min |u| = {d.min_radius:.3e}")
    if d.winding != 1:
        raise CurveValidationError(f"curve must wind once counterclockwise around the origin, winding = {d.winding}")
    if not d.max_radius < d.admissible:
        raise CurveValidationError(
            f"curve too large: max |u| = {d.max_radius:.6g} >= admissible radius {d.admissible:.6g} "
            f"(focal bound {d.focal_bound:.6g})"
        )
    return d


# ---------------------------------------------------------------------------
# the constructed hypersurface


class NormalDecomposition(NamedTuple):
    rho1: float
    rho2: float


class EigenRow(NamedTuple):
    """One common eigenspace of the constructed hypersurface.

    ``label`` is ``"E1"``, ``"E2"`` or ``"theta"``; ``vectors`` holds the
    images of the eigenspace basis under the differential of ``f``.
    """

    label: str
    index: int
    seed_lam: float
    seed_mu: float
    multiplicity: int
    shape: float
    jacobi: float
    vectors: np.ndarray

    @property
    def name(self):
        return self.label if self.label == "theta" else f"{self.label}_{self.index}"


class RowValue(NamedTuple):
    label: str
    value: float
    multiplicity: int


@dataclass
class _Frame:
    """Per-factor geometry at ``(p1, p2, theta)``."""

    x: list
    n: list
    u: np.ndarray
    du: np.ndarray
    ddu: np.ndarray
    speed: float = field(init=False)

    def __post_init__(self):
        self.speed = float(math.hypot(*self.du))

    @property
    def rho(self):
        return (-self.du[1] / self.speed, self.du[0] / self.speed)


class ConstructedHypersurface(Hypersurface):
    """``f(M1 x M2 x S^1)``; itself usable as a seed in a larger product.

    Parameters are triples ``(p1, p2, theta)``.
    """

    kind = "constructed"

    def __init__(self, m1, m2, curve, validate=True, budget=16):
        self.m1 = m1
        self.m2 = m2
        self.curve = curve
        self.ambient = ProductSpace((m1.ambient, m2.ambient))
        self.diagnostics = validate_curve(curve, m1, m2, budget=budget) if validate else None

    # -- parameters -----------------------------------------------------

    def base_param(self):
        return (self.m1.base_param(), self.m2.base_param(), 0.0)

    def sample_param(self, rng):
        p1 = self.m1.sample_param(rng)
        p2 = self.m2.sample_param(rng)
        return (p1, p2, float(rng.uniform(0.0, TWO_PI)))

    def local_chart(self, p):
        p1, p2, theta = p
        d1, d2 = self.m1.dim, self.m2.dim
        c1, c2 = self.m1.local_chart(p1), self.m2.local_chart(p2)
        return lambda t: (c1(t[:d1]), c2(t[d1:d1 + d2]), theta + t[d1 + d2])

    # -- geometry -------------------------------------------------------

    def _frame(self, p1, p2, theta):
        return _Frame(
            x=[self.m1.embed(p1), self.m2.embed(p2)],
            n=[self.m1.normal(p1), self.m2.normal(p2)],
            u=self.curve.u(theta),
            du=self.curve.du(theta),
            ddu=self.curve.ddu(theta),
        )

    def _factors(self):
        return (self.m1.ambient, self.m2.ambient)

    def tube_map(self, p1, p2, theta):
        g = self._frame(p1, p2, theta)
        X = self._factors()
        return self.ambient.join([X[i].geodesic(g.x[i], g.n[i], g.u[i]) for i in range(2)])

    def _transported_normals(self, g):
        X = self._factors()
        return [X[i].velocity(g.x[i], g.n[i], g.u[i]) for i in range(2)]

    def unit_normal(self, p1, p2, theta):
        """Unit normal of the tube and its factor weights ``(rho1, rho2)``."""
        g = self._frame(p1, p2, theta)
        if not g.speed > 0:
            raise CurveValidationError(f"curve is singular at theta = {theta}")
        T = self._transported_normals(g)
        rho1, rho2 = g.rho
        return self.ambient.join([rho1 * T[0], rho2 * T[1]]), NormalDecomposition(rho1, rho2)

    def product_angle(self, theta):
        """``-(u1'^2 - u2'^2) / (u1'^2 + u2'^2)``."""
        d1, d2 = self.curve.du(theta)
        return float(-(d1 * d1 - d2 * d2) / (d1 * d1 + d2 * d2))

    def product_angle_via_structure(self, p1, p2, theta):
        """``<P N, N>`` evaluated on the actual unit normal."""
        n, _ = self.unit_normal(p1, p2, theta)
        return self.ambient.inner(self.ambient.product_structure(n), n)

    def eigen_rows(self, p1, p2, theta):
        """Common eigenspaces with closed-form eigenvalues, in frame order.

        Raises
        ------
        FocalPointError
            If a Jacobi scale factor is within ``1e-10`` of zero.
        """
        g = self._frame(p1, p2, theta)
        X = self._factors()
        rho = g.rho
        seeds = (self.m1, self.m2)
        params = (p1, p2)
        D1 = X[0].ambient_dim
        rows = []
        for i in range(2):
            data = seeds[i].point_data(params[i])
            ui = float(g.u[i])
            for k, pair in enumerate(data.spectra):
                ratio, scale = kernels.offset_shape(pair.lam, pair.mu, ui)
                if abs(scale) <= FOCAL_GUARD:
                    raise FocalPointError(
                        f"focal point reached in factor {i + 1}: scale {scale:.3e} at offset {ui:.6g} "
                        f"for eigenpair ({pair.lam:.6g}, {pair.mu:.6g})"
                    )
                vecs = np.zeros((self.ambient.ambient_dim, pair.multiplicity))
                blk = slice(0, D1) if i == 0 else slice(D1, self.ambient.ambient_dim)
                for m in range(pair.multiplicity):
                    w = data.frame @ pair.basis[:, m]
                    vecs[blk, m] = scale * X[i].parallel_transport(g.x[i], g.n[i], ui, w)
                rows.append(
                    EigenRow(f"E{i + 1}", k, pair.lam, pair.mu, pair.multiplicity,
                              rho[i] * ratio + 0.0, rho[i] ** 2 * pair.mu + 0.0, vecs)
                )
        T = self._transported_normals(g)
        d1, d2 = g.du
        kappa = (g.du[0] * g.ddu[1] - g.ddu[0] * g.du[1]) / g.speed ** 3
        theta_vec = self.ambient.join([d1 * T[0], d2 * T[1]])[:, None]
        rows.append(EigenRow("theta", 0, math.nan, math.nan, 1, float(kappa), 0.0, theta_vec))
        return rows

    def tube_differential(self, p1, p2, theta):
        """Images of the eigenspace bases (E1 rows, E2 rows, then d/dtheta) as columns."""
        return np.hstack([r.vectors for r in self.eigen_rows(p1, p2, theta)])

    def shape_spectrum(self, p1, p2, theta):
        return [RowValue(r.name, r.shape, r.multiplicity) for r in self.eigen_rows(p1, p2, theta)]

    def normal_jacobi_spectrum(self, p1, p2, theta):
        return [RowValue(r.name, r.jacobi, r.multiplicity) for r in self.eigen_rows(p1, p2, theta)]

    def joint_spectrum(self, p1, p2, theta):
        return self.point_data((p1, p2, theta)).spectra

    def flat_section(self, p1, p2):
        """``(s1, s2) -> (exp(s1 N1), exp(s2 N2))`` through ``(f1(p1), f2(p2))``."""
        def sigma(s):
            s1, s2 = s
            return self.ambient.join([self.m1.normal_offset(p1, s1), self.m2.normal_offset(p2, s2)])
        return sigma

    # -- Hypersurface interface -----------------------------------------

    def embed(self, p):
        return self.tube_map(*p)

    def normal(self, p):
        return self.unit_normal(*p)[0]

    def point_data(self, p):
        p1, p2, theta = p
        rows = self.eigen_rows(p1, p2, theta)
        vecs = np.hstack([r.vectors for r in rows])
        norms = np.sqrt(np.einsum("ij,ij->j", vecs, self.ambient.signature[:, None] * vecs))
        frame = vecs / norms
        shape = np.diag([r.shape for r in rows for _ in range(r.multiplicity)])
        jac = np.diag([r.jacobi for r in rows for _ in range(r.multiplicity)])
        n, _ = self.unit_normal(p1, p2, theta)
        return HypersurfacePointData(
            self.tube_map(p1, p2, theta), frame, n, shape, jac, joint_eigenspaces(shape, jac)
        )


def as_hypersurface(C):
    """A constructed hypersurface already is a :class:`Hypersurface`."""
    if not isinstance(C, ConstructedHypersurface):
        raise TypeError("expected a ConstructedHypersurface")
    return C


def tube_map(C, p1, p2, theta):
    return C.tube_map(p1, p2, theta)


def unit_normal(C, p1, p2, theta):
    return C.unit_normal(p1, p2, theta)


def product_angle(C, theta):
    return C.product_angle(theta)


def flat_section(C, p1, p2):
    return C.flat_section(p1, p2)


# ---------------------------------------------------------------------------
# Jacobi fields


def strongly_jacobi_field(H, p, v0, s):
    """Jacobi field along the normal geodesic with ``Y(0) = v0``, ``Y'(0) = -A v0``.

    Evaluated in closed form as the parallel transport of
    ``(cos(s sqrt(R)) - sin(s sqrt(R))/sqrt(R) A) v0``, where ``R`` is the
    normal Jacobi operator at ``p``.
    """
    data = H.point_data(p)
    X = H.ambient
    coords = X.gram(data.frame, np.asarray(v0, dtype=float)[:, None])[:, 0]
    M = spectral_cos(data.normal_jacobi, s) - spectral_sinc(data.normal_jacobi, s) @ data.shape
    w = data.frame @ (M @ coords)
    return X.parallel_transport(data.point, data.normal, s, w)
