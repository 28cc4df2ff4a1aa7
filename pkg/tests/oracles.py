"""Independent dense constructions used as test oracles.

Everything here is written straight from the block formulas with np.block,
sharing no code with the term-based assembly in ``delayhinf.lmi``.
"""

import numpy as np


def error_system(sys_, K_A, K_B, K_C):
    n = sys_.n
    Z = np.zeros((n, n))
    A_bar = np.block([[sys_.A_a, Z], [K_B @ sys_.C_a0, K_A]])
    A_bar_d = np.vstack([Z, K_B @ sys_.C_a1])
    B_bar = np.vstack([sys_.B_a, K_B @ sys_.D_a])
    C_bar = np.hstack([sys_.E_a, -K_C])
    I0 = np.hstack([np.eye(n), Z])
    return A_bar, A_bar_d, B_bar, C_bar, I0


def analysis_matrix(sys_, gains, gamma, tau, P, Q1, Q2):
    """Delay-dependent analysis matrix, blocks (eta, w, e, [x_a-int, w-int])."""
    A_bar, A_bar_d, B_bar, C_bar, I0 = error_system(sys_, gains.K_A, gains.K_B, gains.K_C)
    Q2 = np.atleast_2d(Q2)
    n, nw, nz = sys_.n, sys_.nw, sys_.nz
    Ah = A_bar + A_bar_d @ I0
    Psi = P @ Ah + Ah.T @ P + tau * I0.T @ Q1 @ I0
    Gam = np.hstack([P @ A_bar_d @ sys_.A_a, P @ A_bar_d @ sys_.B_a])
    Qd = np.block([[Q1, np.zeros((n, nw))], [np.zeros((nw, n)), Q2]])
    return np.block([
        [Psi, P @ B_bar, C_bar.T, Gam],
        [B_bar.T @ P, -gamma ** 2 * np.eye(nw) + tau * Q2, np.zeros((nw, nz)), np.zeros((nw, n + nw))],
        [C_bar, np.zeros((nz, nw)), -np.eye(nz), np.zeros((nz, n + nw))],
        [Gam.T, np.zeros((n + nw, nw)), np.zeros((n + nw, nz)), -Qd / tau],
    ])


def expanded_analysis_matrix(sys_, gains, gamma, tau, P, Q1, Q2):
    """Same condition with tau I0' Q1 I0 pulled out into a Q1^-1 block."""
    A_bar, A_bar_d, B_bar, C_bar, I0 = error_system(sys_, gains.K_A, gains.K_B, gains.K_C)
    Q2 = np.atleast_2d(Q2)
    n, nw, nz = sys_.n, sys_.nw, sys_.nz
    Ah = A_bar + A_bar_d @ I0
    Psi1 = P @ Ah + Ah.T @ P
    Gam1 = np.hstack([P @ A_bar_d @ sys_.A_a, P @ A_bar_d @ sys_.B_a, I0.T])
    m = 2 * n + nw
    Qs = np.zeros((m, m))
    Qs[:n, :n] = Q1
    Qs[n:n + nw, n:n + nw] = Q2
    Qs[n + nw:, n + nw:] = np.linalg.inv(Q1)
    return np.block([
        [Psi1, P @ B_bar, C_bar.T, Gam1],
        [B_bar.T @ P, -gamma ** 2 * np.eye(nw) + tau * Q2, np.zeros((nw, nz)), np.zeros((nw, m))],
        [C_bar, np.zeros((nz, nw)), -np.eye(nz), np.zeros((nz, m))],
        [Gam1.T, np.zeros((m, nw)), np.zeros((m, nz)), -Qs / tau],
    ])


def synthesis_matrix(sys_, gamma, tau, q1, X, Y, sA, sB, sC, Q2):
    """Linearized synthesis matrix with Q1 = q1 I."""
    n, nw, nz = sys_.n, sys_.nw, sys_.nz
    A, B, E, Ca1 = sys_.A_a, sys_.B_a, sys_.E_a, sys_.C_a1
    Cs = sys_.C_a0 + sys_.C_a1
    Q2 = np.atleast_2d(Q2)
    I = np.eye(n)
    T1 = np.block([
        [A @ X + X @ A.T, A + sA.T],
        [A.T + sA, Y @ A + A.T @ Y + sB @ Cs + Cs.T @ sB.T],
    ])
    T2 = np.vstack([B, Y @ B + sB @ sys_.D_a])
    T3 = np.vstack([X @ E.T - sC.T, E.T])
    T4 = np.block([
        [np.zeros((n, n)), np.zeros((n, nw)), X],
        [sB @ Ca1 @ A, sB @ Ca1 @ B, I],
    ])
    m = 2 * n + nw
    Qs = np.zeros((m, m))
    Qs[:n, :n] = q1 * I
    Qs[n:n + nw, n:n + nw] = Q2
    Qs[n + nw:, n + nw:] = I / q1
    return np.block([
        [T1, T2, T3, T4],
        [T2.T, -gamma ** 2 * np.eye(nw) + tau * Q2, np.zeros((nw, nz)), np.zeros((nw, m))],
        [T3.T, np.zeros((nz, nw)), -np.eye(nz), np.zeros((nz, m))],
        [T4.T, np.zeros((m, nw)), np.zeros((m, nz)), -Qs / tau],
    ])


def change_of_variables(sys_, gains, X, Y, M, N):
    """(script_A, script_B, script_C) from gains and the P / P^-1 blocks."""
    Cs = sys_.C_a0 + sys_.C_a1
    sA = Y @ sys_.A_a @ X + N @ gains.K_B @ Cs @ X + N @ gains.K_A @ M.T
    sB = N @ gains.K_B
    sC = gains.K_C @ M.T
    return sA, sB, sC


def random_spd(rng, n, scale=1.0):
    G = rng.standard_normal((n, n))
    return scale * (G @ G.T / n + np.eye(n))
