"""Fixed-step simulation of the plant, the delayed road channel, and two observers.

Two drive modes:

``"model"``
    the road velocity is the fifth augmented state, driven by ``D_r w``
    exactly as the filter design assumes; the attenuation bound applies here.
``"scenario"``
    the road velocity follows a prescribed :class:`~delayhinf.model.RoadProfile`.

The disturbance ``w`` is piecewise constant over each step and drawn i.i.d.
normal with standard deviation ``sigma_w / sqrt(dt)`` from
``numpy.random.default_rng(seed)`` (PCG64), ``N + 1`` samples for ``N`` steps.
Delayed reads before ``t = 0`` return 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.integrate import trapezoid

from . import kernels
from .exceptions import DelayContractError, DomainError, NumericalFailureError
from .model import AugmentedDelaySystem, Plant, RoadProfile, augment, eval_road

MODES = ("model", "scenario")
_STAGE_FRACTIONS = np.array([0.0, 0.5, 1.0])
_SNAP = 1e-9


@dataclass(frozen=True)
class DelayProfile:
    """Time-varying channel delay ``tau(t)``.

    kinds: ``constant`` (``tau``), ``sinusoid`` (``mean + amplitude *
    sin(2 pi t / period)``), ``random-walk`` (Gaussian increments of
    ``step_std`` per step, clipped to ``[tau_min, tau_max]``, seeded).
    """

    kind: str = "constant"
    tau: float = 0.0
    mean: float = 0.0
    amplitude: float = 0.0
    period: float = 1.0
    seed: int = 0
    step_std: float = 0.0
    tau_min: float = 0.0
    tau_max: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "sinusoid", "random-walk"):
            raise DomainError(f"unknown delay kind {self.kind!r}")
        if self.kind == "sinusoid" and not self.period > 0:
            raise DomainError("sinusoid delay needs a positive period")
        if self.kind == "random-walk" and not (0 <= self.tau_min <= self.tau_max):
            raise DomainError("random-walk delay needs 0 <= tau_min <= tau_max")

    @classmethod
    def constant(cls, tau: float) -> "DelayProfile":
        return cls("constant", tau=float(tau))

    @classmethod
    def sinusoid(cls, mean: float, amplitude: float, period: float) -> "DelayProfile":
        return cls("sinusoid", mean=float(mean), amplitude=float(amplitude), period=float(period))

    @classmethod
    def random_walk(cls, seed: int, step_std: float, tau_min: float, tau_max: float) -> "DelayProfile":
        return cls("random-walk", seed=int(seed), step_std=float(step_std),
                   tau_min=float(tau_min), tau_max=float(tau_max))

    def grid(self, n_steps: int, dt: float) -> tuple[np.ndarray, np.ndarray]:
        """Delay at grid points ``(N + 1,)`` and at RK4 stage times ``(N, 3)``."""
        k = np.arange(n_steps + 1, dtype=float)
        stage_t = (k[:-1, None] + _STAGE_FRACTIONS[None, :]) * dt
        if self.kind == "constant":
            return np.full(n_steps + 1, self.tau), np.full((n_steps, 3), self.tau)
        if self.kind == "sinusoid":
            def f(t):
                return self.mean + self.amplitude * np.sin(2.0 * np.pi * t / self.period)
            return f(k * dt), f(stage_t)
        rng = np.random.default_rng(self.seed)
        steps = rng.standard_normal(n_steps) * self.step_std
        tau = np.empty(n_steps + 1)
        tau[0] = 0.5 * (self.tau_min + self.tau_max)
        for i in range(n_steps):
            tau[i + 1] = min(max(tau[i] + steps[i], self.tau_min), self.tau_max)
        mid = 0.5 * (tau[:-1] + tau[1:])
        return tau, np.column_stack([tau[:-1], mid, tau[1:]])


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-3
    horizon: float = 10.0
    seed: int = 0
    sigma_w: float = 0.01
    mode: str = "scenario"
    x0: tuple | None = None

    def __post_init__(self):
        if not self.dt > 0:
            raise DomainError("dt must be positive")
        if not self.horizon >= self.dt:
            raise DomainError("horizon must be at least one step")
        if not self.sigma_w >= 0:
            raise DomainError("sigma_w must be non-negative")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))

    def initial_state(self, n: int = 5) -> np.ndarray:
        if self.x0 is None:
            return np.zeros(n)
        x0 = np.asarray(self.x0, dtype=float)
        if x0.shape != (n,):
            raise DomainError(f"x0 must have {n} entries")
        return x0


@dataclass(frozen=True)
class SimTrace:
    t: np.ndarray
    x_a: np.ndarray
    xh: np.ndarray
    y_a: np.ndarray
    e: np.ndarray
    w: np.ndarray
    tau: np.ndarray
    label: str = ""

    @property
    def rdot(self) -> np.ndarray:
        return self.x_a[:, 4]

    def __len__(self):
        return self.t.shape[0]


@dataclass(frozen=True)
class Metrics:
    rmse: np.ndarray
    peak: np.ndarray
    error_energy: float
    disturbance_energy: float
    energy_ratio: float | None
    ratio_defined: bool
    gamma: float | None = None

    def as_dict(self) -> dict:
        return {
            "rmse": self.rmse.tolist(),
            "peak": self.peak.tolist(),
            "error_energy": self.error_energy,
            "disturbance_energy": self.disturbance_energy,
            "energy_ratio": self.energy_ratio,
            "ratio_defined": self.ratio_defined,
            "gamma": self.gamma,
        }


@dataclass(frozen=True)
class KalmanBaseline:
    L: np.ndarray
    P_care: np.ndarray
    q_w: float
    r_diag: tuple


def _disturbance(cfg: SimConfig) -> np.ndarray:
    rng = np.random.default_rng(cfg.seed)
    return rng.standard_normal(cfg.n_steps + 1) * (cfg.sigma_w / math.sqrt(cfg.dt))


def _positions(tau_grid, tau_st, dt):
    """Fractional grid index of every delayed read, snapped onto exact integers."""
    N = tau_st.shape[0]
    k = np.arange(N + 1, dtype=float)
    pos_grid = k - tau_grid / dt
    pos_st = k[:-1, None] + _STAGE_FRACTIONS[None, :] - tau_st / dt
    for p in (pos_grid, pos_st):
        r = np.rint(p)
        near = np.abs(p - r) < _SNAP
        p[near] = r[near]
    return pos_grid, pos_st


def _delayed_road(road, pos, dt):
    return np.where(pos < 0.0, 0.0, eval_road(road, np.maximum(pos, 0.0) * dt))


def _check_delay(sys, dt, *arrays):
    lo, hi = sys.tau_min, sys.tau_max
    if lo > 0 and dt > lo:
        raise DelayContractError(f"dt={dt} exceeds tau_min={lo}; the delayed read would need future samples")
    for a in arrays:
        if a.size and (a.min() < lo - 1e-12 or a.max() > hi + 1e-12):
            raise DelayContractError(
                f"delay samples span [{a.min():.6g}, {a.max():.6g}], outside [{lo}, {hi}]"
            )


def _lookup_grid(Z, col, pos):
    """History lookup at grid-time positions (never beyond the current sample)."""
    out = np.zeros_like(pos)
    ok = pos >= 0.0
    i = np.floor(pos[ok]).astype(int)
    f = pos[ok] - i
    i1 = np.minimum(i + 1, Z.shape[0] - 1)
    vals = np.where(f == 0.0, Z[i, col], Z[i, col] * (1.0 - f) + Z[i1, col] * f)
    out[ok] = vals
    return out


def _run(sys, observer, road, delay, cfg, backend, label, K_C):
    """Shared driver. ``observer`` = (F_oo, G_oy, n_obs) with x_obs' = F_oo x_obs + G_oy y_a."""
    F_oo, G_oy = observer
    no = F_oo.shape[0]
    N, dt = cfg.n_steps, cfg.dt
    w_all = _disturbance(cfg)
    w = w_all[:N]
    tau_grid, tau_st = delay.grid(N, dt)
    _check_delay(sys, dt, tau_grid, tau_st)
    pos_grid, pos_st = _positions(tau_grid, tau_st, dt)
    t = np.arange(N + 1) * dt
    x0 = cfg.initial_state(sys.n)
    e4 = np.zeros(sys.ny)
    e4[sys.ny - 1] = 1.0
    C_del = sys.C_a1 @ np.eye(sys.n)[:, sys.n - 1]   # column that reads the delayed road

    if cfg.mode == "model":
        n = sys.n
        F = np.block([[sys.A_a, np.zeros((n, no))], [G_oy @ sys.C_a0, F_oo]])
        g = np.concatenate([sys.B_a[:, 0], G_oy @ sys.D_a[:, 0]])
        h = np.zeros(n + no)
        q = np.concatenate([np.zeros(n), G_oy @ C_del])
        u_st = np.zeros((N, 3))
        z0 = np.concatenate([x0, _observer_init(x0, no)])
        Z, r_steps = kernels.rk4_delay(F, g, h, q, w, u_st, u_st, pos_st, n - 1, dt, z0, backend=backend)
        x_a = Z[:, :n]
        xh = Z[:, n:]
        r_last = _lookup_grid(Z, n - 1, pos_grid[-1:])
    else:
        m = sys.n - 1
        A, B_r, B_w = sys.A_a[:m, :m], sys.A_a[:m, m], sys.B_a[:m, 0]
        F = np.block([[A, np.zeros((m, no))], [G_oy @ sys.C_a0[:, :m], F_oo]])
        g = np.concatenate([B_w, G_oy @ sys.D_a[:, 0]])
        h = np.concatenate([B_r, G_oy @ sys.C_a0[:, m]])
        q = np.concatenate([np.zeros(m), G_oy @ C_del])
        stage_t = (np.arange(N)[:, None] + _STAGE_FRACTIONS[None, :]) * dt
        u_st = eval_road(road, stage_t)
        rdel_st = _delayed_road(road, pos_st, dt)
        rd = eval_road(road, t)
        x0 = x0.copy()
        x0[m] = rd[0]
        z0 = np.concatenate([x0[:m], _observer_init(x0, no)])
        Z, r_steps = kernels.rk4_delay(F, g, h, q, w, u_st, rdel_st, pos_st, -1, dt, z0, backend=backend)
        x_a = np.column_stack([Z[:, :m], rd])
        xh = Z[:, m:]
        r_last = _delayed_road(road, pos_grid[-1:], dt)

    r_grid = np.concatenate([r_steps, r_last])
    y_a = x_a @ sys.C_a0.T + np.outer(w_all, sys.D_a[:, 0]) + np.outer(r_grid, e4)
    if xh.shape[1] < sys.n:
        xh = np.column_stack([xh, np.zeros((N + 1, sys.n - xh.shape[1]))])
    e = x_a @ sys.E_a.T - xh @ K_C.T
    return SimTrace(t, x_a, xh, y_a, e, w_all, tau_grid, label)


def _observer_init(x0, no):
    # filter starts at the true augmented state; history clause is vacuous
    return np.asarray(x0[:no], dtype=float).copy()


def simulate(sys: AugmentedDelaySystem, gains, road: RoadProfile, delay: DelayProfile, cfg: SimConfig,
             backend: str | None = None) -> SimTrace:
    """Plant plus the full-order filter ``xh' = K_A xh + K_B y_a``, ``z_hat = K_C xh``."""
    K_A, K_B, K_C = (np.asarray(x, dtype=float) for x in (gains.K_A, gains.K_B, gains.K_C))
    return _run(sys, (K_A, K_B), road, delay, cfg, backend, "hinf", K_C)


def kalman_baseline(plant: Plant, q_w: float = 1.0, r_diag=(1e-4, 1e-4, 1e-4)) -> KalmanBaseline:
    """Steady-state Kalman gain for the plant alone; the road is not modelled."""
    r_diag = tuple(float(r) for r in r_diag)
    if len(r_diag) != plant.C0.shape[0] or min(r_diag) <= 0:
        raise DomainError("r_diag needs one positive entry per on-board measurement")
    if not q_w >= 0:
        raise DomainError("q_w must be non-negative")
    A, C = np.asarray(plant.A), np.asarray(plant.C0)
    R = np.diag(r_diag)
    Q = q_w * (plant.B_w @ plant.B_w.T)
    try:
        P = scipy.linalg.solve_continuous_are(A.T, C.T, Q, R)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailureError(f"CARE solve failed: {exc}") from exc
    P = 0.5 * (P + P.T)
    L = P @ C.T @ np.linalg.inv(R)
    if np.linalg.eigvals(A - L @ C).real.max() >= 0:
        raise NumericalFailureError("Kalman observer A - L C0 is not Hurwitz")
    return KalmanBaseline(L, P, float(q_w), r_diag)


def simulate_kalman(plant: Plant, baseline: KalmanBaseline, road: RoadProfile, cfg: SimConfig,
                    sys: AugmentedDelaySystem | None = None, delay: DelayProfile | None = None,
                    backend: str | None = None) -> SimTrace:
    """Same plant and noise as :func:`simulate`, observed by ``xh' = A xh + L (y0 - C0 xh)``.

    The estimate is padded with a zero road column; ``sys`` and ``delay``
    only matter for the road model in ``"model"`` mode and the recorded
    ``y1`` column.
    """
    if sys is None:
        sys = augment(plant)
    delay = delay or DelayProfile.constant(sys.tau_min)
    A, C0, L = np.asarray(plant.A), np.asarray(plant.C0), baseline.L
    m = A.shape[0]
    G_oy = np.hstack([L, np.zeros((m, sys.ny - C0.shape[0]))])
    F_oo = A - L @ C0
    K_C = np.hstack([np.eye(m), np.zeros((m, sys.n - m))])
    return _run(sys, (F_oo, G_oy), road, delay, cfg, backend, "kalman", K_C)


def metrics(trace: SimTrace, gamma: float | None = None) -> Metrics:
    """RMSE, peak error, and the energy ratio int|e|^2 / int w^2 (trapezoidal)."""
    if len(trace) == 0:
        raise DomainError("empty trace")
    e = trace.e
    rmse = np.sqrt(np.mean(e ** 2, axis=0))
    peak = np.abs(e).max(axis=0)
    if len(trace) > 1:
        ee = float(trapezoid(np.sum(e ** 2, axis=1), trace.t))
        we = float(trapezoid(trace.w ** 2, trace.t))
    else:
        ee = we = 0.0
    defined = we > 0.0
    return Metrics(rmse, peak, ee, we, ee / we if defined else None, defined, gamma)
