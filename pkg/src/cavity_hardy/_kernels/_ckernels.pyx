# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror ``_fallback``."""

from libc.math cimport exp, cos, fabs

import numpy as np
cimport numpy as cnp

cnp.import_array()


def simpson_profile_sum(double v, double b, double inv_rdef, double wavenumber,
                        double t_end, Py_ssize_t n):
    """Composite Simpson integral of the unit-amplitude mode profile on [0, t_end]."""
    cdef double h = t_end / n
    cdef double acc = 0.0
    cdef double x, f, w
    cdef Py_ssize_t i
    for i in range(n + 1):
        x = v * (i * h) - b
        f = exp(-fabs(x) * inv_rdef) * cos(wavenumber * x)
        if i == 0 or i == n:
            w = 1.0
        elif i & 1:
            w = 4.0
        else:
            w = 2.0
        acc += w * f
    return acc * h / 3.0


def rotate_pairs(double complex[::1] psi, const cnp.int64_t[::1] ia,
                 const cnp.int64_t[::1] ib, const double[::1] c,
                 const double[::1] s):
    """In place: psi[ia] <- c psi[ia] - s psi[ib], psi[ib] <- s psi[ia] + c psi[ib]."""
    cdef Py_ssize_t m = ia.shape[0]
    cdef Py_ssize_t j
    cdef double complex x, y
    for j in range(m):
        x = psi[ia[j]]
        y = psi[ib[j]]
        psi[ia[j]] = c[j] * x - s[j] * y
        psi[ib[j]] = s[j] * x + c[j] * y
