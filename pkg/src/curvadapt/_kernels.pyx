# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scalar kernels; mirrors ``_kernels_py`` function by function."""
from libc.math cimport cos, sin, cosh, sinh, sqrt, atan2, atanh, fabs, INFINITY, NAN, M_PI

import numpy as np

TAYLOR_THRESHOLD = 1e-8
TAYLOR_TERMS = 12
FOCAL_EDGE_TOL = 1e-12

cdef double _THRESH = 1e-8
cdef int _TERMS = 12
cdef double _EDGE = 1e-12


cdef inline double _fcos(double mu, double s) nogil:
    cdef double x = mu * s * s
    cdef double acc
    cdef int j
    if fabs(x) < _THRESH:
        acc = 1.0
        for j in range(_TERMS - 1, 0, -1):
            acc = 1.0 - x * acc / ((2 * j) * (2 * j - 1))
        return acc
    if mu > 0.0:
        return cos(s * sqrt(mu))
    return cosh(s * sqrt(-mu))


cdef inline double _fsinc(double mu, double s) nogil:
    cdef double x = mu * s * s
    cdef double acc, k
    cdef int j
    if fabs(x) < _THRESH:
        acc = 1.0
        for j in range(_TERMS - 1, 0, -1):
            acc = 1.0 - x * acc / ((2 * j) * (2 * j + 1))
        return s * acc
    if mu > 0.0:
        k = sqrt(mu)
        return sin(s * k) / k
    k = sqrt(-mu)
    return sinh(s * k) / k


cdef inline double _ratio(double lam, double mu, double u, double* den) nogil:
    cdef double c = _fcos(mu, u)
    cdef double sn = _fsinc(mu, u)
    den[0] = c - lam * sn
    if den[0] == 0.0:
        return NAN
    return (mu * sn + lam * c) / den[0]


def fcos(double mu, double s):
    return _fcos(mu, s)


def fsinc(double mu, double s):
    return _fsinc(mu, s)


def fcos_fsinc_array(mus, double s):
    cdef double[::1] m = np.ascontiguousarray(mus, dtype=np.float64).ravel()
    shape = np.shape(mus)
    out_c = np.empty(m.shape[0])
    out_s = np.empty(m.shape[0])
    cdef double[::1] c = out_c
    cdef double[::1] sn = out_s
    cdef Py_ssize_t i
    with nogil:
        for i in range(m.shape[0]):
            c[i] = _fcos(m[i], s)
            sn[i] = _fsinc(m[i], s)
    return out_c.reshape(shape), out_s.reshape(shape)


def offset_shape(double lam, double mu, double u):
    cdef double den
    cdef double r = _ratio(lam, mu, u, &den)
    return r, den


def focal_radius(double lam, double mu):
    cdef double k, a
    if mu > 0.0:
        k = sqrt(mu)
        a = atan2(k, lam)
        return min(a, M_PI - a) / k
    if mu < 0.0:
        k = sqrt(-mu)
        if fabs(lam) <= k * (1.0 + _EDGE):
            return INFINITY
        return atanh(k / fabs(lam)) / k
    if lam == 0.0:
        return INFINITY
    return 1.0 / fabs(lam)


def table_sweep(double lam, double mu, u, rho):
    cdef double[::1] uu = np.ascontiguousarray(u, dtype=np.float64).ravel()
    cdef double[::1] rr = np.ascontiguousarray(rho, dtype=np.float64).ravel()
    shape = np.shape(u)
    out_v = np.empty(uu.shape[0])
    out_d = np.empty(uu.shape[0])
    cdef double[::1] v = out_v
    cdef double[::1] d = out_d
    cdef double den
    cdef Py_ssize_t i
    with nogil:
        for i in range(uu.shape[0]):
            v[i] = rr[i] * _ratio(lam, mu, uu[i], &den)
            d[i] = den
    return out_v.reshape(shape), out_d.reshape(shape)
