# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_pykernels`` for the reference semantics."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def simpson_panels(values, widths):
    cdef const double[::1] f = np.ascontiguousarray(values, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(widths, dtype=np.float64)
    cdef Py_ssize_t k, npan = w.shape[0]
    cdef double total = 0.0
    for k in range(npan):
        total += w[k] / 6.0 * (f[3 * k] + 4.0 * f[3 * k + 1] + f[3 * k + 2])
    return total


def cumulative_panels(values, widths):
    cdef const double[:, ::1] f = np.ascontiguousarray(values, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(widths, dtype=np.float64)
    cdef Py_ssize_t m = f.shape[0], npan = w.shape[0]
    out_arr = np.zeros((m, npan + 1), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, k
    cdef double acc
    for i in range(m):
        acc = 0.0
        for k in range(npan):
            acc += w[k] / 6.0 * (f[i, 3 * k] + 4.0 * f[i, 3 * k + 1] + f[i, 3 * k + 2])
            out[i, k + 1] = acc
    return out_arr


cdef inline void _rhs(double* s, double* d, double qm, double ex, double ez,
                      double by, double inv_c) nogil:
    d[0] = s[2]
    d[1] = s[3]
    d[2] = qm * (ex - inv_c * s[3] * by)
    d[3] = qm * (ez + inv_c * s[2] * by)


def rk4_lorentz_plane(state, double qm, double ex, double ez, double by,
                      double inv_c, double dt, long nsteps):
    cdef double s[4]
    cdef double tmp[4]
    cdef double k1[4]
    cdef double k2[4]
    cdef double k3[4]
    cdef double k4[4]
    cdef double half = 0.5 * dt
    cdef long n
    cdef int j
    init = np.asarray(state, dtype=np.float64)
    for j in range(4):
        s[j] = init[j]
    with nogil:
        for n in range(nsteps):
            _rhs(s, k1, qm, ex, ez, by, inv_c)
            for j in range(4):
                tmp[j] = s[j] + half * k1[j]
            _rhs(tmp, k2, qm, ex, ez, by, inv_c)
            for j in range(4):
                tmp[j] = s[j] + half * k2[j]
            _rhs(tmp, k3, qm, ex, ez, by, inv_c)
            for j in range(4):
                tmp[j] = s[j] + dt * k3[j]
            _rhs(tmp, k4, qm, ex, ez, by, inv_c)
            for j in range(4):
                s[j] = s[j] + dt / 6.0 * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j])
    return np.array([s[0], s[1], s[2], s[3]])
