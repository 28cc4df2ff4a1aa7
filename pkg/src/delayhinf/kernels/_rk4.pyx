# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled fixed-step RK4 for linear dynamics fed by a delayed scalar channel.

Must stay step-for-step equivalent to ``_rk4_py.rk4_delay``.
"""

import numpy as np
from libc.math cimport floor

cdef double SLOPE_UNSET = 0.0


cdef inline double _lookup(double[:, ::1] Z, int col, Py_ssize_t k, double pos,
                           double slope, double dt) noexcept nogil:
    cdef Py_ssize_t i
    cdef double f
    if pos < 0.0:
        return 0.0
    if pos > <double>k:
        return Z[k, col] + (pos - <double>k) * dt * slope
    i = <Py_ssize_t>floor(pos)
    f = pos - <double>i
    if f == 0.0:
        return Z[i, col]
    return Z[i, col] * (1.0 - f) + Z[i + 1, col] * f


def rk4_delay(double[:, ::1] F, double[::1] g, double[::1] h, double[::1] q,
              double[::1] w, double[:, ::1] u_st, double[:, ::1] rdel_st,
              double[:, ::1] pos_st, int hist_idx, double dt, double[::1] z0):
    cdef Py_ssize_t n = F.shape[0]
    cdef Py_ssize_t N = w.shape[0]
    cdef Py_ssize_t k, i, j, j2, s
    cdef double acc, r, wk, slope = 0.0
    out = np.empty((N + 1, n))
    rout = np.empty(N)
    cdef double[:, ::1] Z = out
    cdef double[::1] R = rout
    cdef double[:, ::1] K = np.empty((4, n))
    cdef double[::1] tmp = np.empty(n)
    cdef double[4] coef = [0.0, 0.5, 0.5, 1.0]
    cdef int[4] stage_col = [0, 1, 1, 2]

    for i in range(n):
        Z[0, i] = z0[i]
    with nogil:
        for k in range(N):
            wk = w[k]
            for s in range(4):
                # stage state
                if s == 0:
                    for i in range(n):
                        tmp[i] = Z[k, i]
                else:
                    for i in range(n):
                        tmp[i] = Z[k, i] + coef[s] * dt * K[s - 1, i]
                j = stage_col[s]
                if hist_idx >= 0:
                    r = _lookup(Z, hist_idx, k, pos_st[k, j], slope, dt)
                else:
                    r = rdel_st[k, j]
                if s == 0:
                    R[k] = r
                for i in range(n):
                    acc = g[i] * wk + h[i] * u_st[k, j] + q[i] * r
                    for j2 in range(n):
                        acc = acc + F[i, j2] * tmp[j2]
                    K[s, i] = acc
                if s == 0 and hist_idx >= 0:
                    slope = K[0, hist_idx]
            for i in range(n):
                Z[k + 1, i] = Z[k, i] + dt / 6.0 * (K[0, i] + 2.0 * K[1, i] + 2.0 * K[2, i] + K[3, i])
    return out, rout
