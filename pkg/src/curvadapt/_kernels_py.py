"""Pure-Python scalar kernels.

Reference implementation of the hot scalar routines. The compiled module
``_kernels`` mirrors every function here with the same signature; the
backend actually used is chosen in :mod:`curvadapt.kernels`.

For a curvature value ``mu`` and an arc length ``s`` the two branch
functions are

    fcos(mu, s)  = cos(s sqrt(mu)),          cosh(s sqrt(-mu)),          1
    fsinc(mu, s) = sin(s sqrt(mu))/sqrt(mu), sinh(s sqrt(-mu))/sqrt(-mu), s

for ``mu > 0``, ``mu < 0`` and ``mu == 0`` respectively. They satisfy
``d/ds fcos = -mu * fsinc`` and ``d/ds fsinc = fcos``.
"""
import math

import numpy as np

TAYLOR_THRESHOLD = 1e-8
TAYLOR_TERMS = 12
FOCAL_EDGE_TOL = 1e-12


def fcos(mu, s):
    x = mu * s * s
    if abs(x) < TAYLOR_THRESHOLD:
        # sum_{j<12} (-x)^j / (2j)!, Horner from the top term down
        acc = 1.0
        for j in range(TAYLOR_TERMS - 1, 0, -1):
            acc = 1.0 - x * acc / ((2 * j) * (2 * j - 1))
        return acc
    if mu > 0.0:
        return math.cos(s * math.sqrt(mu))
    return math.cosh(s * math.sqrt(-mu))


def fsinc(mu, s):
    x = mu * s * s
    if abs(x) < TAYLOR_THRESHOLD:
        acc = 1.0
        for j in range(TAYLOR_TERMS - 1, 0, -1):
            acc = 1.0 - x * acc / ((2 * j) * (2 * j + 1))
        return s * acc
    if mu > 0.0:
        k = math.sqrt(mu)
        return math.sin(s * k) / k
    k = math.sqrt(-mu)
    return math.sinh(s * k) / k


def fcos_fsinc_array(mus, s):
    """Evaluate both branch functions for every entry of ``mus``."""
    mus = np.asarray(mus, dtype=float)
    c = np.empty(mus.shape)
    sn = np.empty(mus.shape)
    for i, mu in enumerate(mus.flat):
        c.flat[i] = fcos(mu, s)
        sn.flat[i] = fsinc(mu, s)
    return c, sn


def offset_shape(lam, mu, u):
    """Shape ratio of a parallel hypersurface at signed offset ``u``.

    Returns ``(ratio, denominator)`` with
    ``ratio = (mu*fsinc + lam*fcos) / (fcos - lam*fsinc)``. The denominator
    is the Jacobi scale factor; the caller decides how close to zero is too
    close. ``ratio`` is ``nan`` when the denominator is exactly zero.
    """
    c = fcos(mu, u)
    sn = fsinc(mu, u)
    den = c - lam * sn
    num = mu * sn + lam * c
    if den == 0.0:
        return math.nan, den
    return num / den, den


def focal_radius(lam, mu):
    """Smallest ``|s| > 0`` with ``fcos(mu, s) - lam*fsinc(mu, s) == 0``.

    Both signs of ``s`` are searched. Returns ``inf`` when no root exists.
    """
    if mu > 0.0:
        k = math.sqrt(mu)
        a = math.atan2(k, lam)  # roots at a + n*pi, a in (0, pi)
        return min(a, math.pi - a) / k
    if mu < 0.0:
        k = math.sqrt(-mu)
        if abs(lam) <= k * (1.0 + FOCAL_EDGE_TOL):  # horosphere-like: no focal point
            return math.inf
        return math.atanh(k / abs(lam)) / k
    if lam == 0.0:
        return math.inf
    return 1.0 / abs(lam)


def table_sweep(lam, mu, u, rho):
    """Shape eigenvalue of one factor eigenpair over a theta sweep.

    ``u`` holds the factor offsets ``u_i(theta)`` and ``rho`` the matching
    normal weights (``-u2'/|u'|`` for the first factor, ``u1'/|u'|`` for
    the second). Returns ``(values, denominators)`` with
    ``values = rho * ratio``.
    """
    u = np.asarray(u, dtype=float)
    rho = np.asarray(rho, dtype=float)
    values = np.empty(u.shape)
    dens = np.empty(u.shape)
    for i in range(u.size):
        ratio, den = offset_shape(lam, mu, u.flat[i])
        values.flat[i] = rho.flat[i] * ratio
        dens.flat[i] = den
    return values, dens
