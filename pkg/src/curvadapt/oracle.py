"""Independent numerical checks of the closed forms.

Nothing here reads a closed-form spectrum. The oracle sees only

* an immersion chart ``t -> ambient point`` (finite differences of it give
  the tangent frame, the unit normal and the second fundamental form),
* the ambient space's own curvature tensor,
* a reference normal, used solely to fix the orientation sign.

Closed-form and numeric results meet in :func:`compare_spectra`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .matfun import cluster_values, commutator_residual
from .spaceform import curvature_normal_operator

DEFAULT_H = 1e-4
DEFAULT_TOL = 1e-5
GAUSS_H = 1e-3
CLUSTER_TOL = 1e-6
MAX_CONDITION = 1e8


class OracleError(ValueError):
    """The finite-difference data is too degenerate to use."""


@dataclass(frozen=True)
class FDShape:
    """Finite-difference second-order data of a hypersurface at one point."""

    point: np.ndarray
    frame: np.ndarray
    normal: np.ndarray
    shape: np.ndarray


def _fd_normal(space, x0, frame, reference_normal):
    B = space.tangent_frame(x0)
    coeffs = space.gram(frame, B)  # dim x n
    _, _, vt = np.linalg.svd(coeffs)
    n = B @ vt[-1]
    n /= space.norm(n)
    if reference_normal is not None and space.inner(n, reference_normal) < 0:
        n = -n
    return n


def fd_shape_operator(space, chart, dim, h=DEFAULT_H, reference_normal=None):
    """Shape operator of the immersion ``chart`` at ``chart(0)``.

    1. Central differences give the chart Jacobian ``J``.
    2. ``W`` with ``(J W)^T G (J W) = I`` makes the frame ``J W`` orthonormal.
    3. The unit normal is the null direction of that frame inside the
       ambient tangent space (flat-ambient constraints projected out).
    4. Second differences of ``s -> chart(W s)`` with step ``h`` paired
       with the normal give the symmetric shape matrix in that frame.

    The normal is flipped to agree with ``reference_normal`` when given.
    """
    zero = np.zeros(dim)
    x0 = np.asarray(chart(zero), dtype=float)
    eye = np.eye(dim)
    J = np.column_stack([(chart(h * e) - chart(-h * e)) / (2.0 * h) for e in eye])
    g = space.gram(J)
    ev = np.linalg.eigvalsh(g)
    if not ev[0] > 0 or ev[-1] / ev[0] > MAX_CONDITION:
        raise OracleError(f"degenerate chart frame: metric eigenvalues {ev}")
    L = np.linalg.cholesky(g)
    W = np.linalg.inv(L).T
    frame = J @ W
    n = _fd_normal(space, x0, frame, reference_normal)

    def f(s):
        return chart(W @ s)

    S = np.empty((dim, dim))
    for a in range(dim):
        ea = h * eye[a]
        d2 = (f(ea) - 2.0 * x0 + f(-ea)) / (h * h)
        S[a, a] = space.inner(d2, n)
        for b in range(a):
            eb = h * eye[b]
            d2 = (f(ea + eb) - f(ea - eb) - f(eb - ea) + f(-ea - eb)) / (4.0 * h * h)
            S[a, b] = S[b, a] = space.inner(d2, n)
    return FDShape(x0, frame, n, S)


def fd_pair(space, chart, dim, h=DEFAULT_H, reference_normal=None):
    """Numeric ``(A, R(N))`` in the finite-difference frame."""
    fd = fd_shape_operator(space, chart, dim, h, reference_normal)
    R = curvature_normal_operator(space, fd.point, fd.normal, fd.frame)
    return fd, R


def _rk4_jacobi(space, p, v, Y0, Y0prime, s_end, steps):
    """Frame coordinates of the Jacobi field on the step grid, plus the frame map."""
    if steps < 10:
        raise ValueError("ode_jacobi needs at least 10 steps")
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    E = space.tangent_frame(p)

    def frame_at(s):
        return np.column_stack([space.parallel_transport(p, v, s, E[:, a]) for a in range(E.shape[1])])

    def curv(s):
        x = space.geodesic(p, v, s)
        gp = space.velocity(p, v, s)
        F = frame_at(s)
        imgs = np.column_stack([space.jacobi_operator(x, F[:, b], gp) for b in range(F.shape[1])])
        return space.gram(F, imgs)

    y = space.gram(E, np.asarray(Y0, dtype=float)[:, None])[:, 0]
    yp = space.gram(E, np.asarray(Y0prime, dtype=float)[:, None])[:, 0]
    grid = np.linspace(0.0, s_end, steps + 1)
    dt = s_end / steps
    ys = [y]
    K2 = curv(0.0)
    for s in grid[:-1]:
        K1 = K2
        Km = curv(s + 0.5 * dt)
        K2 = curv(s + dt)
        k1y, k1p = yp, -K1 @ y
        k2y, k2p = yp + 0.5 * dt * k1p, -Km @ (y + 0.5 * dt * k1y)
        k3y, k3p = yp + 0.5 * dt * k2p, -Km @ (y + 0.5 * dt * k2y)
        k4y, k4p = yp + dt * k3p, -K2 @ (y + dt * k3y)
        y = y + dt / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y)
        yp = yp + dt / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
        ys.append(y)
    return grid, ys, frame_at


def ode_jacobi_path(space, p, v, Y0, Y0prime, s_end, steps=1000):
    """RK4 solution of ``Y'' + R(Y, g') g' = 0`` along ``g(s) = exp_p(s v)``.

    Works in a parallel-transported orthonormal frame; the curvature matrix
    is re-evaluated from the ambient curvature tensor at every stage.
    Returns ``(s, Y)`` with ``Y[k]`` the field at ``s[k]``, ``k = 0..steps``.
    """
    grid, ys, frame_at = _rk4_jacobi(space, p, v, Y0, Y0prime, s_end, steps)
    return grid, np.array([frame_at(s) @ y for s, y in zip(grid, ys)])


def ode_jacobi(space, p, v, Y0, Y0prime, s_end, steps=1000):
    """``Y(s_end)`` for the same problem as :func:`ode_jacobi_path`."""
    grid, ys, frame_at = _rk4_jacobi(space, p, v, Y0, Y0prime, s_end, steps)
    return frame_at(grid[-1]) @ ys[-1]


def fd_gauss_curvature(space, chart, h=GAUSS_H):
    """Intrinsic Gauss curvature of a 2-D chart at ``chart((0, 0))`` (Brioschi).

    The metric coefficients are central differences of the chart; their
    first and second derivatives are central differences of those, all with
    step ``h``.
    """
    def efg(s1, s2):
        c = np.array([s1, s2])
        du = (chart(c + [h, 0.0]) - chart(c - [h, 0.0])) / (2 * h)
        dv = (chart(c + [0.0, h]) - chart(c - [0.0, h])) / (2 * h)
        return np.array([space.inner(du, du), space.inner(du, dv), space.inner(dv, dv)])

    m = {(i, j): efg(i * h, j * h) for i in (-1, 0, 1) for j in (-1, 0, 1)}
    E, F, G = m[0, 0]
    if not E * G - F * F > 1e-14:
        raise OracleError("degenerate metric in Gauss curvature chart")
    d_u = (m[1, 0] - m[-1, 0]) / (2 * h)
    d_v = (m[0, 1] - m[0, -1]) / (2 * h)
    d_uu = (m[1, 0] - 2 * m[0, 0] + m[-1, 0]) / h**2
    d_vv = (m[0, 1] - 2 * m[0, 0] + m[0, -1]) / h**2
    d_uv = (m[1, 1] - m[1, -1] - m[-1, 1] + m[-1, -1]) / (4 * h * h)
    Eu, Fu, Gu = d_u
    Ev, Fv, Gv = d_v
    Evv = d_vv[0]
    Guu = d_uu[2]
    Fuv = d_uv[1]
    M1 = np.array([
        [-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev],
        [Fv - 0.5 * Gu, E, F],
        [0.5 * Gv, F, G],
    ])
    M2 = np.array([
        [0.0, 0.5 * Ev, 0.5 * Gu],
        [0.5 * Ev, E, F],
        [0.5 * Gu, F, G],
    ])
    return float((np.linalg.det(M1) - np.linalg.det(M2)) / (E * G - F * F) ** 2)


# ---------------------------------------------------------------------------
# comparison


@dataclass(frozen=True)
class ComparisonRow:
    lam_closed: float
    lam_numeric: float
    mu_closed: float
    mu_numeric: float

    @property
    def error(self):
        return max(abs(self.lam_closed - self.lam_numeric), abs(self.mu_closed - self.mu_numeric))


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple
    commutator: float
    tol: float
    params: dict = field(default_factory=dict)

    @property
    def max_error(self):
        return max((r.error for r in self.rows), default=0.0)

    @property
    def passed(self):
        return self.max_error <= self.tol and self.commutator <= self.tol


def numeric_joint(A, R, cluster_tol=CLUSTER_TOL):
    """Expanded ``(lam, mu)`` lists of a nearly commuting numeric pair.

    ``A`` is diagonalised and clustered; ``R`` is diagonalised inside
    each cluster so degenerate shape eigenvalues still resolve ``mu``.
    """
    lams, Q = np.linalg.eigh(0.5 * (A + A.T))
    out_l, out_m = [], []
    for grp in cluster_values(lams, cluster_tol * (1.0 + np.abs(lams).max(initial=0.0))):
        V = Q[:, grp]
        mus = np.linalg.eigvalsh(V.T @ R @ V)
        out_l.extend(lams[grp])
        out_m.extend(mus)
    return np.array(out_l), np.array(out_m)


def assign(closed_lam, closed_mu, numeric_lam, numeric_mu):
    """Indices into the numeric lists matching each closed entry.

    Minimises the total ``|dlam| + |dmu|`` over all one-to-one assignments.
    """
    cl, cm = np.asarray(closed_lam, float), np.asarray(closed_mu, float)
    nl, nm = np.asarray(numeric_lam, float), np.asarray(numeric_mu, float)
    if cl.shape != nl.shape:
        raise ValueError(f"cannot match {cl.size} closed values to {nl.size} numeric values")
    cost = np.abs(cl[:, None] - nl[None, :]) + np.abs(cm[:, None] - nm[None, :])
    ri, ci = linear_sum_assignment(cost)
    out = np.empty(cl.size, dtype=int)
    out[ri] = ci
    return out


def compare_spectra(closed, numeric, tol=DEFAULT_TOL, params=None):
    """Match closed-form pairs to a numeric ``(A, R)`` pair.

    ``closed`` is a :class:`~curvadapt.matfun.SpectralData`. Pairs are
    expanded by multiplicity and assigned to numeric eigenpairs by minimum
    total distance.
    """
    A, R = (np.asarray(m, dtype=float) for m in numeric)
    if A.shape != R.shape or A.shape[0] != closed.dim:
        raise ValueError(f"dimension mismatch: closed {closed.dim}, numeric {A.shape} / {R.shape}")
    cl, cm = closed.expanded()
    nl, nm = numeric_joint(A, R)
    idx = assign(cl, cm, nl, nm)
    rows = tuple(ComparisonRow(float(cl[i]), float(nl[j]), float(cm[i]), float(nm[j])) for i, j in enumerate(idx))
    rows = tuple(sorted(rows, key=lambda r: (r.lam_closed, r.mu_closed)))
    return ComparisonReport(rows, commutator_residual(A, R), tol, dict(params or {}))


def verify_point(H, p, h=DEFAULT_H, tol=DEFAULT_TOL):
    """Compare ``H.point_data(p).spectra`` with the oracle at ``p``."""
    fd, R = fd_pair(H.ambient, H.chart(p), H.dim, h, reference_normal=H.normal(p))
    closed = H.point_data(p).spectra
    return compare_spectra(closed, (fd.shape, R), tol, {"h": h, "tol": tol})

