"""Filter synthesis: solve the linearized LMIs, undo the change of variables,
and re-certify the recovered gains with the delay-dependent analysis LMI."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import (
    CertificationFailureError,
    DomainError,
    FactorizationDegeneracyError,
    SynthesisInfeasibleError,
)
from .lmi import assemble_synthesis_lmi, assemble_verification_lmi
from .model import AugmentedDelaySystem
from .solver import FEASIBLE, SdpCertificate, SolverOptions, certify, solve_feasibility

log = logging.getLogger(__name__)


def q1_search_grid(lo: float = 1e-3, hi: float = 1e3, count: int = 13) -> tuple[float, ...]:
    """Log-spaced grid ordered by distance from 1 in log scale (ties: smaller first)."""
    if not (0 < lo <= hi) or count < 1:
        raise DomainError(f"invalid q1 grid [{lo}, {hi}] x {count}")
    grid = np.logspace(math.log10(lo), math.log10(hi), count)
    return tuple(float(q) for q in sorted(grid, key=lambda q: (abs(math.log10(q)), q)))


@dataclass(frozen=True)
class SynthesisOptions:
    # a tighter box than the solver default: near |v| ~ 1e6 the optimizer drifts to
    # huge X, Y, where I - XY is badly conditioned and re-certification fails
    solver: SolverOptions = field(default_factory=lambda: SolverOptions(bound_radius=1e3))
    q1_grid: tuple[float, ...] = field(default_factory=q1_search_grid)
    epsilon: float | None = None
    # sigma_min / sigma_max below this makes I - XY degenerate
    svd_rcond: float = 1e-10


@dataclass(frozen=True)
class FilterGains:
    K_A: np.ndarray
    K_B: np.ndarray
    K_C: np.ndarray

    def __post_init__(self):
        for name in ("K_A", "K_B", "K_C"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.ndim != 2 or not np.all(np.isfinite(arr)):
                raise DomainError(f"{name} must be a finite 2-D matrix")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def zeros(cls, sys: AugmentedDelaySystem) -> "FilterGains":
        return cls(np.zeros((sys.n, sys.n)), np.zeros((sys.n, sys.ny)), np.zeros((sys.nz, sys.n)))


@dataclass(frozen=True)
class SynthesisResult:
    gains: FilterGains
    X: np.ndarray
    Y: np.ndarray
    script_A: np.ndarray
    script_B: np.ndarray
    script_C: np.ndarray
    M: np.ndarray
    N: np.ndarray
    P: np.ndarray             # recovered from P Phi1 = Phi2
    Q2_synthesis: np.ndarray  # Q2 returned with the linearized LMI
    P_certified: np.ndarray   # analysis-LMI certificate (P, Q1, Q2)
    Q1: np.ndarray
    Q2: np.ndarray
    gamma: float
    tau_max: float
    q1_selected: float
    margin: float
    synthesis_margin: float
    iterations: int
    q1_margins: dict = field(default_factory=dict)
    certificate: SdpCertificate | None = None

    @property
    def Phi1(self) -> np.ndarray:
        n = self.X.shape[0]
        return np.block([[self.X, np.eye(n)], [self.M.T, np.zeros((n, n))]])

    @property
    def Phi2(self) -> np.ndarray:
        n = self.X.shape[0]
        return np.block([[np.eye(n), self.Y], [np.zeros((n, n)), self.N.T]])


def recover_gains(X, Y, script_A, script_B, script_C, sys: AugmentedDelaySystem, rcond: float = 1e-10):
    """Invert the change of variables.

    Returns ``(gains, P, M, N)`` with ``M N^T = I - X Y`` split symmetrically
    from the SVD and ``P = Phi2 Phi1^{-1}``.
    """
    X, Y = np.asarray(X, dtype=float), np.asarray(Y, dtype=float)
    n = X.shape[0]
    I = np.eye(n)
    U, sigma, Vt = np.linalg.svd(I - X @ Y)
    if sigma[0] == 0.0 or sigma[-1] < rcond * sigma[0]:
        raise FactorizationDegeneracyError(
            f"I - XY is singular (sigma_min/sigma_max = {sigma[-1] / sigma[0] if sigma[0] else 0.0:.3e}); "
            "re-solve with X perturbed by +1e-6 I"
        )
    root = np.sqrt(sigma)
    M = U * root
    N = Vt.T * root

    C_sum = sys.C_a0 + sys.C_a1
    K_B = np.linalg.solve(N, script_B)
    K_C = np.linalg.solve(M, np.asarray(script_C, dtype=float).T).T
    inner = script_A - Y @ sys.A_a @ X - script_B @ C_sum @ X
    K_A = np.linalg.solve(M, np.linalg.solve(N, inner).T).T

    Phi1 = np.block([[X, I], [M.T, np.zeros((n, n))]])
    Phi2 = np.block([[I, Y], [np.zeros((n, n)), N.T]])
    s1 = np.linalg.svd(Phi1, compute_uv=False)
    if s1[-1] < rcond * s1[0]:
        raise FactorizationDegeneracyError("Phi1 is singular; P cannot be recovered")
    P = np.linalg.solve(Phi1.T, Phi2.T).T
    P = 0.5 * (P + P.T)
    return FilterGains(K_A, K_B, K_C), P, M, N


def _solve_synthesis(sys, gamma, tau, opts: SynthesisOptions):
    margins = {}
    for q1 in opts.q1_grid:
        problem = assemble_synthesis_lmi(sys, gamma, tau, q1, epsilon=opts.epsilon)
        cert = solve_feasibility(problem, opts.solver)
        margins[q1] = cert.margin
        log.info("synthesis gamma=%g q1=%g: %s margin=%.3e (%d it)", gamma, q1, cert.status, cert.margin, cert.iterations)
        if cert.feasible:
            return q1, cert, margins
    table = ", ".join(f"q1={q:.3g}: {m:.3e}" for q, m in margins.items())
    raise SynthesisInfeasibleError(f"synthesis LMIs infeasible at gamma={gamma:g}, tau_max={tau:g} ({table})", margins)


def verify_gains(sys: AugmentedDelaySystem, gains: FilterGains, gamma: float, tau_max: float | None = None,
                 solver: SolverOptions | None = None, epsilon: float | None = None):
    """Solve the analysis LMI for fixed gains; returns ``(problem, certificate)``."""
    problem = assemble_verification_lmi(sys, gains, gamma, tau_max, epsilon=epsilon)
    return problem, solve_feasibility(problem, solver)


def synthesize(sys: AugmentedDelaySystem, gamma: float, opts: SynthesisOptions | None = None,
               tau_max: float | None = None) -> SynthesisResult:
    """Design and certify a full-order filter achieving attenuation ``gamma``."""
    opts = opts or SynthesisOptions()
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    tau = sys.tau_max if tau_max is None else float(tau_max)
    q1, cert, margins = _solve_synthesis(sys, gamma, tau, opts)
    v = cert.values
    gains, P, M, N = recover_gains(v["X"], v["Y"], v["script_A"], v["script_B"], v["script_C"], sys, opts.svd_rcond)

    problem, vcert = verify_gains(sys, gains, gamma, tau, opts.solver, opts.epsilon)
    # the change of variables already yields a candidate (P, q1 I, Q2); a cold
    # re-solve can stall when that certificate is badly scaled
    candidate = {"P": P}
    if tau > 0:
        candidate.update(Q1=q1 * np.eye(sys.n), Q2=v["Q2"])
    cand_margin = certify(problem, candidate)
    if cand_margin < min(vcert.margin, -problem.epsilon):
        log.info("re-solve margin %.3e, keeping recovered certificate %.3e", vcert.margin, cand_margin)
        vcert = replace(vcert, status=FEASIBLE, values=candidate, margin=cand_margin)
    checked = certify(problem, vcert.values)
    if not (vcert.feasible and checked < 0):
        raise CertificationFailureError(
            f"recovered gains fail the analysis LMI at gamma={gamma:g}, tau_max={tau:g} "
            f"(margin {vcert.margin:.3e}, status {vcert.status})",
            vcert.margin,
        )
    nw = sys.nw
    return SynthesisResult(
        gains=gains, X=v["X"], Y=v["Y"], script_A=v["script_A"], script_B=v["script_B"],
        script_C=v["script_C"], M=M, N=N, P=P, Q2_synthesis=v["Q2"],
        P_certified=vcert.values["P"],
        Q1=vcert.values.get("Q1", np.zeros((sys.n, sys.n))),
        Q2=vcert.values.get("Q2", np.zeros((nw, nw))),
        gamma=float(gamma), tau_max=tau, q1_selected=q1, margin=vcert.margin,
        synthesis_margin=cert.margin, iterations=cert.iterations + vcert.iterations,
        q1_margins=margins, certificate=vcert,
    )


def minimize_gamma(sys: AugmentedDelaySystem, tau_max: float | None = None, opts: SynthesisOptions | None = None,
                   rel_tol: float = 1e-2, gamma_start: float = 1.0, gamma_cap: float = 2.0 ** 20,
                   gamma_floor: float = 1e-8) -> SynthesisResult:
    """Smallest certified attenuation level, by geometric bisection on gamma."""
    opts = opts or SynthesisOptions()
    tau = sys.tau_max if tau_max is None else float(tau_max)
    last_q1 = None

    def attempt(gamma):
        nonlocal last_q1
        grid = opts.q1_grid
        if last_q1 is not None:
            grid = (last_q1,) + tuple(q for q in grid if q != last_q1)
        try:
            res = synthesize(sys, gamma, replace(opts, q1_grid=grid), tau)
        except (SynthesisInfeasibleError, CertificationFailureError, FactorizationDegeneracyError) as exc:
            log.info("gamma=%g rejected: %s", gamma, exc)
            return None
        last_q1 = res.q1_selected
        return res

    hi, best = gamma_start, None
    while hi <= gamma_cap:
        best = attempt(hi)
        if best is not None:
            break
        hi *= 2.0
    if best is None:
        raise SynthesisInfeasibleError(f"no certified gamma up to {gamma_cap:g}")

    lo = hi / 2.0
    while lo >= gamma_floor:
        res = attempt(lo)
        if res is None:
            break
        hi, best = lo, res
        lo /= 2.0
    else:
        return best

    while (hi - lo) / hi > rel_tol:
        mid = math.sqrt(lo * hi)
        res = attempt(mid)
        if res is None:
            lo = mid
        else:
            hi, best = mid, res
    return best
