"""Space forms and their products, embedded in flat ambient spaces.

* sphere ``S^n(c)``: ``<x, x> = 1/c`` in Euclidean ``R^(n+1)``
* hyperbolic ``H^n(c)``, ``c < 0``: ``<x, x>_L = 1/c``, ``x[0] > 0``, in
  Minkowski ``R^(1,n)`` with signature ``(-, +, ..., +)``
* euclidean ``E^n``: ``R^n`` itself

A product stores all factors in one flat coordinate vector (block layout)
and keeps the factor tree for the product structure. Every closed form here
uses the branch functions ``fcos``/``fsinc`` from :mod:`curvadapt.kernels`,
so one formula covers all three curvature signs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .errors import GeometryError

MEMBER_TOL = 1e-8


class Space:
    """Operations shared by space forms and products.

    Subclasses provide ``dim``, ``ambient_dim``, ``leaves`` (a tuple of
    ``(SpaceForm, slice)``) and ``signature``.
    """

    # -- metric -------------------------------------------------------------

    def inner(self, v, w):
        return float(np.dot(self.signature * np.asarray(v, dtype=float), w))

    def metric(self, v, w):
        """Riemannian metric of two tangent vectors at a common point."""
        return self.inner(v, w)

    def norm(self, v):
        return math.sqrt(max(self.inner(v, v), 0.0))

    def gram(self, V, W=None):
        """Matrix of inner products between the columns of ``V`` and ``W``."""
        V = np.asarray(V, dtype=float)
        W = V if W is None else np.asarray(W, dtype=float)
        return V.T @ (self.signature[:, None] * W)

    # -- membership ---------------------------------------------------------

    def membership_residual(self, x):
        x = np.asarray(x, dtype=float)
        return max(sf._member_res(x[sl]) for sf, sl in self.leaves)

    def tangency_residual(self, x, v):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        return max(sf._tangent_res(x[sl], v[sl]) for sf, sl in self.leaves)

    def contains(self, x, tol=MEMBER_TOL):
        return self.membership_residual(x) <= tol

    def check_point(self, x, tol=MEMBER_TOL):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.ambient_dim,) or not np.isfinite(x).all():
            raise GeometryError(f"point must be a finite vector of length {self.ambient_dim}")
        res = self.membership_residual(x)
        if res > tol:
            raise GeometryError(f"point is not on {self}: membership residual {res:.3e}")
        return x

    def check_tangent(self, x, v, tol=MEMBER_TOL):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.ambient_dim,) or not np.isfinite(v).all():
            raise GeometryError(f"vector must be a finite vector of length {self.ambient_dim}")
        res = self.tangency_residual(x, v)
        if res > tol * (1.0 + np.abs(v).max()):
            raise GeometryError(f"vector is not tangent to {self}: residual {res:.3e}")
        return v

    def project(self, x, v):
        """Orthogonal projection of an ambient vector onto ``T_x``."""
        x = np.asarray(x, dtype=float)
        out = np.array(v, dtype=float)
        for sf, sl in self.leaves:
            out[sl] = sf._project(x[sl], out[sl])
        return out

    # -- geodesics ----------------------------------------------------------

    def geodesic(self, x, v, s):
        """``exp_x(s v)``; each factor moves at its own speed ``|v_i|``."""
        x = self.check_point(x)
        v = self.check_tangent(x, v)
        out = np.empty_like(x)
        for sf, sl in self.leaves:
            out[sl] = sf._geodesic(x[sl], v[sl], s)
        return out

    def velocity(self, x, v, s):
        """``d/ds exp_x(s v)``."""
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        out = np.empty_like(x)
        for sf, sl in self.leaves:
            out[sl] = sf._velocity(x[sl], v[sl], s)
        return out

    def parallel_transport(self, x, v, s, w):
        """Transport ``w`` from ``x`` along ``s -> exp_x(s v)`` to parameter ``s``.

        Per factor, the component of ``w`` along ``v_i`` turns with the
        geodesic velocity and the rest is carried unchanged.
        """
        x = self.check_point(x)
        v = self.check_tangent(x, v)
        w = self.check_tangent(x, w)
        out = np.empty_like(x)
        for sf, sl in self.leaves:
            out[sl] = sf._transport(x[sl], v[sl], s, w[sl])
        return out

    # -- curvature ----------------------------------------------------------

    def jacobi_operator(self, x, w, n):
        """``R(w, n) n`` at ``x``, assembled factor by factor."""
        w = np.asarray(w, dtype=float)
        n = np.asarray(n, dtype=float)
        out = np.empty(self.ambient_dim)
        for sf, sl in self.leaves:
            out[sl] = sf._curv(w[sl], n[sl])
        return out

    # -- frames -------------------------------------------------------------

    def tangent_frame(self, x, exclude=()):
        """Orthonormal basis of ``T_x`` minus ``span(exclude)``.

        Pivoted Gram-Schmidt on projected ambient coordinate vectors: each
        step takes the candidate with the largest remaining norm, lowest
        index on ties. Columns of the result are the basis vectors.
        """
        x = np.asarray(x, dtype=float)
        sig = self.signature
        done = []
        for e in exclude:
            e = np.asarray(e, dtype=float)
            for b in done:
                e = e - self.inner(b, e) * b
            nrm = self.norm(e)
            if nrm < 1e-12:
                raise GeometryError("excluded vectors are linearly dependent")
            done.append(e / nrm)
        k = self.dim - len(done)
        cands = np.array([self.project(x, row) for row in np.eye(self.ambient_dim)]).T
        for b in done:
            cands -= np.outer(b, (sig * b) @ cands)
        basis = []
        for _ in range(k):
            norms2 = np.einsum("i,ij,ij->j", sig, cands, cands)
            j = int(np.argmax(norms2))
            if norms2[j] < 1e-20:
                raise GeometryError("could not complete tangent frame")
            b = cands[:, j] / math.sqrt(norms2[j])
            basis.append(b)
            cands -= np.outer(b, (sig * b) @ cands)
        return np.array(basis).T.reshape(self.ambient_dim, k)

    def random_tangent(self, x, rng, unit=True):
        F = self.tangent_frame(x)
        v = F @ rng.standard_normal(F.shape[1])
        return v / self.norm(v) if unit else v


@dataclass(frozen=True)
class SpaceForm(Space):
    """Complete simply connected space of constant curvature ``curvature``."""

    kind: str
    dim: int
    curvature: float

    def __post_init__(self):
        if self.kind not in ("sphere", "hyperbolic", "euclidean"):
            raise ValueError(f"unknown space form kind {self.kind!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError("dimension must be a positive integer")
        c = float(self.curvature)
        ok = {"sphere": c > 0, "hyperbolic": c < 0, "euclidean": c == 0}[self.kind]
        if not ok:
            raise ValueError(f"curvature {c} is incompatible with kind {self.kind!r}")
        object.__setattr__(self, "curvature", c)

    @classmethod
    def sphere(cls, dim, c=1.0):
        return cls("sphere", dim, c)

    @classmethod
    def hyperbolic(cls, dim, c=-1.0):
        return cls("hyperbolic", dim, c)

    @classmethod
    def euclidean(cls, dim):
        return cls("euclidean", dim, 0.0)

    def __str__(self):
        sym = {"sphere": "S", "hyperbolic": "H", "euclidean": "E"}[self.kind]
        return f"{sym}^{self.dim}({self.curvature:g})"

    @property
    def ambient_dim(self):
        return self.dim if self.kind == "euclidean" else self.dim + 1

    @cached_property
    def signature(self):
        sig = np.ones(self.ambient_dim)
        if self.kind == "hyperbolic":
            sig[0] = -1.0
        return sig

    @cached_property
    def leaves(self):
        return ((self, slice(0, self.ambient_dim)),)

    @property
    def radius(self):
        """Curvature radius ``1/sqrt(|c|)`` (``inf`` for euclidean)."""
        c = self.curvature
        return math.inf if c == 0 else 1.0 / math.sqrt(abs(c))

    def base_point(self):
        x = np.zeros(self.ambient_dim)
        if self.kind != "euclidean":
            x[0] = self.radius
        return x

    def distance(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        c = self.curvature
        if c == 0:
            return float(np.linalg.norm(x - y))
        k = math.sqrt(abs(c))
        d = x - y
        # chord form: accurate for nearby points
        chord = math.sqrt(max(self._ip(d, d), 0.0)) * k / 2.0
        if c > 0:
            return 2.0 * math.asin(min(chord, 1.0)) / k
        return 2.0 * math.asinh(chord) / k

    # leaf kernels on raw coordinate slices

    def _ip(self, v, w):
        return float(np.dot(self.signature * v, w))

    # single-leaf shortcuts of the generic product loops
    def membership_residual(self, x):
        return self._member_res(np.asarray(x, dtype=float))

    def tangency_residual(self, x, v):
        return self._tangent_res(np.asarray(x, dtype=float), np.asarray(v, dtype=float))

    # Residuals are relative to the coordinate scale: hyperboloid
    # coordinates grow like cosh(distance) and so does their roundoff.

    def _member_res(self, x):
        c = self.curvature
        if c == 0:
            return 0.0
        res = abs(c * self._ip(x, x) - 1.0) / max(1.0, abs(c) * float(np.dot(x, x)))
        if c < 0 and x[0] <= 0:
            res = max(res, 1.0)
        return res

    def _tangent_res(self, x, v):
        c = self.curvature
        if c == 0:
            return 0.0
        k = math.sqrt(abs(c))
        return abs(self._ip(x, v)) * k / max(1.0, k * math.sqrt(float(np.dot(x, x))))

    def _project(self, x, v):
        c = self.curvature
        if c == 0:
            return v
        return v - c * self._ip(v, x) * x

    def _geodesic(self, x, v, s):
        mu = self.curvature * self._ip(v, v)
        return kernels.fcos(mu, s) * x + kernels.fsinc(mu, s) * v

    def _velocity(self, x, v, s):
        mu = self.curvature * self._ip(v, v)
        return -mu * kernels.fsinc(mu, s) * x + kernels.fcos(mu, s) * v

    def _transport(self, x, v, s, w):
        vv = self._ip(v, v)
        if vv == 0.0:
            return w.copy()
        alpha = self._ip(w, v) / vv
        return w - alpha * v + alpha * self._velocity(x, v, s)

    def _curv(self, w, n):
        c = self.curvature
        return c * (self._ip(n, n) * w - self._ip(w, n) * n)


@dataclass(frozen=True)
class ProductSpace(Space):
    """Riemannian product of space forms and/or products (recursively)."""

    factors: tuple

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise ValueError("a product needs at least one factor")
        for f in factors:
            if not isinstance(f, Space):
                raise TypeError(f"factor {f!r} is not a space")
        object.__setattr__(self, "factors", factors)

    def __str__(self):
        return "(" + " x ".join(str(f) for f in self.factors) + ")"

    @cached_property
    def dim(self):
        return sum(f.dim for f in self.factors)

    @cached_property
    def ambient_dim(self):
        return sum(f.ambient_dim for f in self.factors)

    @cached_property
    def blocks(self):
        """Ambient slice of each top-level factor."""
        out = []
        start = 0
        for f in self.factors:
            out.append(slice(start, start + f.ambient_dim))
            start += f.ambient_dim
        return tuple(out)

    @cached_property
    def leaves(self):
        out = []
        for f, blk in zip(self.factors, self.blocks):
            for sf, sl in f.leaves:
                out.append((sf, slice(blk.start + sl.start, blk.start + sl.stop)))
        return tuple(out)

    @cached_property
    def signature(self):
        return np.concatenate([f.signature for f in self.factors])

    def base_point(self):
        return np.concatenate([f.base_point() for f in self.factors])

    def split(self, v):
        """Top-level factor components of an ambient vector."""
        v = np.asarray(v, dtype=float)
        return [v[b] for b in self.blocks]

    def join(self, parts):
        return np.concatenate([np.asarray(p, dtype=float) for p in parts])

    def product_structure(self, v):
        """``P(v1, v2) = (v1, -v2)``."""
        if len(self.factors) != 2:
            raise GeometryError("product structure needs exactly two top-level factors")
        out = np.array(v, dtype=float)
        out[self.blocks[1]] *= -1.0
        return out


def apply_product_structure(X, v):
    if not isinstance(X, ProductSpace):
        raise GeometryError("product structure needs a two-factor product space")
    return X.product_structure(v)


def curvature_normal_operator(X, p, n, frame=None):
    """Matrix of ``v -> R(v, n) n`` on ``n^perp`` in an orthonormal frame.

    ``frame`` (columns) defaults to ``X.tangent_frame(p, exclude=[n])``.
    """
    n = np.asarray(n, dtype=float)
    if abs(X.inner(n, n) - 1.0) > 1e-8:
        raise GeometryError(f"normal must be a unit vector, |n|^2 = {X.inner(n, n):.6g}")
    if frame is None:
        frame = X.tangent_frame(p, exclude=[n])
    frame = np.asarray(frame, dtype=float)
    if isinstance(X, SpaceForm):
        return X.curvature * np.eye(frame.shape[1])  # exact for constant curvature
    images = np.array([X.jacobi_operator(p, frame[:, b], n) for b in range(frame.shape[1])]).T
    M = X.gram(frame, images.reshape(frame.shape))
    return 0.5 * (M + M.T)
