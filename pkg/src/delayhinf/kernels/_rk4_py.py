"""Pure-Python RK4 kernel; reference twin of the compiled ``_rk4`` module."""

import math

import numpy as np


def _lookup(Z, col, k, pos, slope, dt):
    if pos < 0.0:
        return 0.0
    if pos > k:
        return Z[k, col] + (pos - k) * dt * slope
    i = int(math.floor(pos))
    f = pos - i
    if f == 0.0:
        return Z[i, col]
    return Z[i, col] * (1.0 - f) + Z[i + 1, col] * f


def rk4_delay(F, g, h, q, w, u_st, rdel_st, pos_st, hist_idx, dt, z0):
    """Integrate ``z' = F z + g w_k + h u(t) + q r(t)`` over ``len(w)`` steps.

    ``r`` is either read from ``rdel_st`` (stage values, ``hist_idx < 0``) or
    looked up in the history of state ``hist_idx`` at fractional grid
    positions ``pos_st``. Returns the state trajectory and the stage-0
    delayed value of every step.
    """
    n = F.shape[0]
    N = w.shape[0]
    Z = np.empty((N + 1, n))
    R = np.empty(N)
    Z[0] = z0
    coef = (0.0, 0.5, 0.5, 1.0)
    cols = (0, 1, 1, 2)
    K = np.empty((4, n))
    slope = 0.0
    for k in range(N):
        wk = w[k]
        zk = Z[k]
        for s in range(4):
            tmp = zk if s == 0 else zk + coef[s] * dt * K[s - 1]
            j = cols[s]
            if hist_idx >= 0:
                r = _lookup(Z, hist_idx, k, pos_st[k, j], slope, dt)
            else:
                r = rdel_st[k, j]
            if s == 0:
                R[k] = r
            K[s] = F @ tmp + g * wk + h * u_st[k, j] + q * r
            if s == 0 and hist_idx >= 0:
                slope = K[0, hist_idx]
        Z[k + 1] = zk + dt / 6.0 * (K[0] + 2.0 * K[1] + 2.0 * K[2] + K[3])
    return Z, R
