"""Dense primal barrier solver for small LMI feasibility problems.

``solve_feasibility`` minimizes ``t`` subject to ``F_k(v) <= t I`` for every
constraint and ``|v_i| <= R`` (the variable box), following the central path
of

    s * t - sum_k log det(t I - F_k(v)) - sum_i log(R^2 - v_i^2)

with Newton's method and a geometric schedule on ``s``. The problem is
feasible in the strict sense when the optimal ``t`` drops below ``-epsilon``.

``certify`` is the independent check: it evaluates every constraint
structurally and returns the largest eigenvalue.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np
import scipy.linalg

from .exceptions import DomainError, InternalConsistencyError
from .lmi import LmiProblem

log = logging.getLogger(__name__)

_MIN_STEP = 1e-6

FEASIBLE = "feasible"
INFEASIBLE = "infeasible-within-bounds"
MAX_ITERATIONS = "max-iterations"


@dataclass(frozen=True)
class SolverOptions:
    max_iterations: int = 200
    kkt_tolerance: float = 1e-9
    bound_radius: float = 1e6
    initial_centering: float = 1.0
    # growth factor of the barrier weight between centering phases
    mu: float = 20.0

    def __post_init__(self):
        for name in ("max_iterations", "kkt_tolerance", "bound_radius", "initial_centering"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if not self.mu > 1:
            raise DomainError("mu must exceed 1")


@dataclass(frozen=True)
class SdpCertificate:
    status: str
    values: dict
    margin: float
    iterations: int
    t: float
    epsilon: float
    warnings: tuple = ()

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE


def _basis(problem: LmiProblem):
    """Constant matrices and per-scalar coefficient stacks of every constraint."""
    n = problem.n_scalars
    zero = problem.zero_values()
    bases = []
    for con in problem.constraints:
        F0 = con.evaluate(zero)
        if not np.array_equal(F0, F0.T):
            raise InternalConsistencyError(f"{con.label}: assembled constant is not symmetric")
        d = con.dimension
        Fi = np.empty((n, d, d))
        unit = np.zeros(n)
        for i in range(n):
            unit[i] = 1.0
            Fi[i] = con.evaluate(problem.unpack(unit)) - F0
            unit[i] = 0.0
        if not np.array_equal(Fi, Fi.transpose(0, 2, 1)):
            raise InternalConsistencyError(f"{con.label}: coefficient matrices are not symmetric")
        bases.append((F0, Fi))
    return bases


class _Barrier:
    def __init__(self, bases, radius):
        self.bases = bases
        self.R = radius
        self.degree = sum(F0.shape[0] for F0, _ in bases)

    def slack(self, v, t, k):
        F0, Fi = self.bases[k]
        S = t * np.eye(F0.shape[0]) - F0 - np.tensordot(v, Fi, axes=1)
        return S

    def value(self, v, t):
        """Barrier value, or ``inf`` outside the domain."""
        if np.any(np.abs(v) >= self.R):
            return np.inf
        total = -np.sum(np.log(self.R - v) + np.log(self.R + v))
        for k in range(len(self.bases)):
            try:
                L = np.linalg.cholesky(self.slack(v, t, k))
            except np.linalg.LinAlgError:
                return np.inf
            total -= 2.0 * np.sum(np.log(np.diag(L)))
        return total

    def derivatives(self, v, t):
        """Gradient and Hessian over the stacked unknowns ``(v, t)``."""
        n = v.size
        g = np.zeros(n + 1)
        H = np.zeros((n + 1, n + 1))
        for k, (F0, Fi) in enumerate(self.bases):
            d = F0.shape[0]
            L = np.linalg.cholesky(self.slack(v, t, k))
            # S = S0 + sum v_i (-F_i) + t I
            G = np.concatenate([-Fi, np.eye(d)[None]], axis=0)
            Z = scipy.linalg.solve_triangular(L, G.transpose(1, 0, 2).reshape(d, -1), lower=True)
            Z = Z.reshape(d, n + 1, d).transpose(2, 1, 0).reshape(d, -1)
            W = scipy.linalg.solve_triangular(L, Z, lower=True)
            W = W.reshape(d, n + 1, d).transpose(1, 0, 2).reshape(n + 1, d * d)
            g -= W[:, :: d + 1].sum(axis=1)
            H += W @ W.T
        a, b = self.R - v, self.R + v
        g[:n] += 1.0 / a - 1.0 / b
        H[np.arange(n), np.arange(n)] += 1.0 / a ** 2 + 1.0 / b ** 2
        return g, H


def _newton_direction(g, H):
    scale = 1.0 / np.sqrt(np.maximum(np.diag(H), np.finfo(float).tiny))
    Hs = H * scale[:, None] * scale[None, :]
    gs = g * scale
    try:
        c = scipy.linalg.cho_factor(Hs, check_finite=False)
        step = -scipy.linalg.cho_solve(c, gs, check_finite=False)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
        step = -np.linalg.lstsq(Hs, gs, rcond=1e-14)[0]
    return step * scale


def rayleigh_exact(F: np.ndarray, vec: np.ndarray) -> float:
    """``vec^T F vec / vec^T vec`` evaluated in exact rational arithmetic."""
    return ritz_max(F, np.asarray(vec, dtype=float).reshape(-1, 1))


def ritz_max(F: np.ndarray, V: np.ndarray) -> float:
    """Largest Rayleigh-Ritz value of ``F`` on ``span(V)``.

    ``V^T F V`` and ``V^T V`` are formed exactly in rationals, so the only
    rounding is relative to the (small) eigenvalues of the cluster rather
    than to ``||F||``. With ``V`` spanning a cluster of close eigenvalues the
    result no longer depends on how LAPACK mixes the cluster's vectors.
    """
    Fq = [[Fraction(x) for x in row] for row in F.tolist()]
    cols = [[Fraction(x) for x in col] for col in V.T.tolist()]
    FV = [[sum((a * b for a, b in zip(row, c)), Fraction(0)) for row in Fq] for c in cols]
    k = len(cols)
    G = np.empty((k, k))
    B = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            G[i, j] = G[j, i] = float(sum((a * b for a, b in zip(cols[i], FV[j])), Fraction(0)))
            B[i, j] = B[j, i] = float(sum((a * b for a, b in zip(cols[i], cols[j])), Fraction(0)))
    if k == 1:
        return float(G[0, 0] / B[0, 0])
    return float(scipy.linalg.eigh(G, B, eigvals_only=True)[-1])


def cluster_size(eigenvalues: np.ndarray, F: np.ndarray) -> int:
    """Number of top eigenvalues too close to the largest to be told apart.

    Eigenvector mixing across a gap ``g`` perturbs a Rayleigh quotient by about
    ``(u ||F||)^2 / g``; gaps under ``1e4 u ||F|| * dim`` are merged.
    """
    w = np.sort(eigenvalues)
    window = 1e4 * np.finfo(float).eps * np.abs(F).max() * F.shape[0]
    return int(np.count_nonzero(w >= w[-1] - window))


def _max_eig(problem: LmiProblem, values) -> float:
    worst = -np.inf
    for F in problem.evaluate(values):
        w, V = np.linalg.eigh(F)
        k = cluster_size(w, F)
        worst = max(worst, ritz_max(F, V[:, -k:]))
    return worst


def solve_feasibility(problem: LmiProblem, opts: SolverOptions | None = None) -> SdpCertificate:
    """Minimize the largest eigenvalue over all constraints inside the variable box."""
    opts = opts or SolverOptions()
    bases = _basis(problem)
    barrier = _Barrier(bases, opts.bound_radius)
    n = problem.n_scalars
    eps = problem.epsilon

    v = np.zeros(n)
    t = max(float(np.linalg.eigvalsh(F0)[-1]) for F0, _ in bases)
    t += 1.0 + abs(t)
    s = opts.initial_centering / max(1.0, abs(t))
    # total barrier degree: matrix blocks plus two log terms per boxed scalar
    m = barrier.degree + 2 * n

    iterations = 0
    status = None
    stalled = False
    while status is None:
        # center for the current weight s
        while True:
            if iterations >= opts.max_iterations:
                status = MAX_ITERATIONS
                break
            g, H = barrier.derivatives(v, t)
            g[n] += s
            step = _newton_direction(g, H)
            decrement = float(-g @ step)
            iterations += 1
            if decrement / 2.0 <= 1e-10:
                break
            f0 = s * t + barrier.value(v, t)
            alpha = 1.0
            while alpha >= _MIN_STEP:
                v_new, t_new = v + alpha * step[:n], t + alpha * step[n]
                f1 = s * t_new + barrier.value(v_new, t_new)
                if np.isfinite(f1) and f1 <= f0 - 0.25 * alpha * decrement:
                    break
                alpha *= 0.5
            else:
                # no descent along the Newton direction: working precision is exhausted
                stalled = True
                break
            v, t = v_new, t_new
            if decrement / 2.0 <= 1e-9 and alpha == 1.0:
                break
        if status is not None or stalled:
            break
        gap = m / s
        if t - gap > -eps:
            # optimal t is provably above -epsilon
            status = INFEASIBLE
        elif gap <= opts.kkt_tolerance * max(1.0, abs(t)):
            status = "done"
        else:
            s *= opts.mu

    values = problem.unpack(v)
    margin = _max_eig(problem, values)
    warnings = []
    if status == MAX_ITERATIONS:
        warnings.append(f"iteration budget of {opts.max_iterations} exhausted")
    # a strictly feasible iterate is a certificate even if the minimization was cut short
    if status != MAX_ITERATIONS or margin < -eps:
        status = FEASIBLE if margin < -eps else INFEASIBLE
    if stalled:
        warnings.append("stopped at the precision limit before the duality-gap tolerance")
    if n and np.abs(v).max() > 0.9 * opts.bound_radius:
        warnings.append(f"iterate within 10% of the variable box (|v|max={np.abs(v).max():.3g})")
    log.debug("solve_feasibility: status=%s margin=%.3e iterations=%d", status, margin, iterations)
    return SdpCertificate(status, values, margin, iterations, float(t), eps, tuple(warnings))


def certify(problem: LmiProblem, values: Mapping[str, np.ndarray]) -> float:
    """Largest eigenvalue over all constraints at ``values``; negative certifies."""
    worst = -np.inf
    for F in problem.evaluate(values):
        d = F.shape[0]
        w = scipy.linalg.eigh(F, eigvals_only=True, driver="evr")
        k = cluster_size(w, F)
        _, vecs = scipy.linalg.eigh(F, subset_by_index=[d - k, d - 1], driver="evr")
        worst = max(worst, ritz_max(F, vecs))
    return worst
