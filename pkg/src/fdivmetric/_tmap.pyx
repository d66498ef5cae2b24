# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled symmetrisation kernel; same arithmetic as ``_tmap_py``."""

import numpy as np

from libc.math cimport exp, expm1, floor, pow, sqrt, INFINITY, isinf, isfinite

cdef double INVPHI = (sqrt(5.0) - 1.0) / 2.0


cdef inline double _interp(const double[::1] v, Py_ssize_t n, double h, double x,
                           double a, double denom) noexcept nogil:
    cdef double u = x / h
    cdef Py_ssize_t k
    cdef double w, y0, y1
    if u > n - 1 + 1e-12:
        return INFINITY
    k = <Py_ssize_t> floor(u)
    if k < 0:
        k = 0
    if k > n - 2:
        k = n - 2
    w = u - k
    if w < 0.0:
        w = 0.0
    if a != 1.0:
        w = expm1(a * h * w) / denom
    y0 = v[k]
    y1 = v[k + 1]
    if isinf(y0) or isinf(y1):
        if not isinf(y0) and w == 0.0:
            return y0
        if not isinf(y1) and w == 1.0:
            return y1
        return INFINITY
    return y0 + w * (y1 - y0)


cdef inline double _objective(const double[::1] v, Py_ssize_t n, double h, double x, double y,
                              double inv_power, double a, double denom) noexcept nogil:
    cdef double z = x - y
    cdef double f1, f2
    if z < 0.0:
        z = 0.0
    f1 = _interp(v, n, h, y, a, denom)
    f2 = _interp(v, n, h, z, a, denom)
    if inv_power != 1.0:
        f1 = pow(f1, inv_power)
        f2 = pow(f2, inv_power)
    return f1 + exp(y) * f2


def apply_T_kernel(values, double h, double factor, int n_scan=64, int n_golden=80, double power=1.0):
    """One application of the map on sampled values (see ``_tmap_py``)."""
    values = np.ascontiguousarray(values, dtype=np.float64)
    if power != 1.0:
        values = values ** power
    cdef const double[::1] v = values
    cdef double inv_power = 1.0 / power
    cdef double denom = expm1(power * h)
    cdef Py_ssize_t n = v.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    cdef int j, kbest, it
    cdef double x, y, g, best, ybest, step, a, b, y1, y2, f1, f2
    with nogil:
        for i in range(n):
            x = h * i
            best = INFINITY
            kbest = 0
            for j in range(n_scan):
                y = x * (<double> j / (n_scan - 1))
                g = _objective(v, n, h, x, y, inv_power, power, denom)
                if g < best:
                    best = g
                    kbest = j
            ybest = x * (<double> kbest / (n_scan - 1))
            step = x / (n_scan - 1)
            a = ybest - step
            if a < 0.0:
                a = 0.0
            b = ybest + step
            if b > x:
                b = x
            y1 = b - INVPHI * (b - a)
            y2 = a + INVPHI * (b - a)
            f1 = _objective(v, n, h, x, y1, inv_power, power, denom)
            f2 = _objective(v, n, h, x, y2, inv_power, power, denom)
            for it in range(n_golden):
                if f1 <= f2:
                    b = y2
                    y2 = y1
                    f2 = f1
                    y1 = b - INVPHI * (b - a)
                    f1 = _objective(v, n, h, x, y1, inv_power, power, denom)
                else:
                    a = y1
                    y1 = y2
                    f1 = f2
                    y2 = a + INVPHI * (b - a)
                    f2 = _objective(v, n, h, x, y2, inv_power, power, denom)
            if f1 < best:
                best = f1
            if f2 < best:
                best = f2
            out[i] = factor * best
        if isfinite(v[0]):
            out[0] = 0.0
        else:
            out[0] = INFINITY
    return out_arr
