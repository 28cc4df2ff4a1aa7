"""Quarter-car plant, delay-augmented filter model, and road velocity profiles.

State ordering follows the usual quarter-car convention::

    x1  tire deflection          x2  unsprung mass velocity
    x3  suspension deflection    x4  sprung mass velocity
    x5  road velocity r_dot (augmented state only)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import DomainError, ParameterError

DEFAULT_D0 = (0.01, 0.01, 0.01)
DEFAULT_D1 = 0.01
DEFAULT_DR = 1.0
# Pole of the road-velocity shaping model r_ddot = -road_decay * r_dot + D_r w.
# A pure integrator (0.0) leaves A_a with a zero eigenvalue, which makes every
# Lyapunov-type certificate of the error system infeasible.
DEFAULT_ROAD_DECAY = 0.5


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SuspensionParams:
    """Physical quarter-car constants (SI units)."""

    m_s: float = 290.0
    m_us: float = 60.0
    k_s: float = 16800.0
    k_us: float = 19000.0
    c_s: float = 200.0
    alpha: float = 0.1

    def __post_init__(self):
        for name in ("m_s", "m_us", "k_s", "k_us"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be strictly positive, got {value!r}")
        if not (np.isfinite(self.c_s) and self.c_s >= 0):
            raise ParameterError(f"c_s must be non-negative, got {self.c_s!r}")
        if not (np.isfinite(self.alpha) and self.alpha >= 0):
            raise ParameterError(f"alpha must be non-negative, got {self.alpha!r}")


TABLE1 = SuspensionParams()


@dataclass(frozen=True)
class Plant:
    A: np.ndarray
    B: np.ndarray
    B_r: np.ndarray
    B_w: np.ndarray
    C0: np.ndarray
    D0: np.ndarray
    params: SuspensionParams = field(default=TABLE1, compare=False)


@dataclass(frozen=True)
class AugmentedDelaySystem:
    """Plant augmented with the road velocity and the delayed road channel.

    ``y_a = C_a0 x_a(t) + C_a1 x_a(t - tau(t)) + D_a w`` with
    ``tau_min <= tau(t) <= tau_max``.
    """

    A_a: np.ndarray
    B_a: np.ndarray
    C_a0: np.ndarray
    C_a1: np.ndarray
    D_a: np.ndarray
    E_a: np.ndarray
    d_r: float
    d_1: float
    tau_min: float
    tau_max: float
    road_decay: float = 0.0

    @property
    def n(self) -> int:
        return self.A_a.shape[0]

    @property
    def ny(self) -> int:
        return self.C_a0.shape[0]

    @property
    def nz(self) -> int:
        return self.E_a.shape[0]

    @property
    def nw(self) -> int:
        return self.B_a.shape[1]

    def with_tau_max(self, tau_max: float) -> "AugmentedDelaySystem":
        if tau_max < self.tau_min:
            raise DomainError(f"tau_max={tau_max} is below tau_min={self.tau_min}")
        return AugmentedDelaySystem(
            self.A_a, self.B_a, self.C_a0, self.C_a1, self.D_a, self.E_a,
            self.d_r, self.d_1, self.tau_min, float(tau_max), self.road_decay,
        )


def build_plant(params: SuspensionParams = TABLE1, d0: Sequence[float] = DEFAULT_D0) -> Plant:
    """Linear quarter-car model with force input, road input and disturbance."""
    if not isinstance(params, SuspensionParams):
        raise ParameterError("params must be a SuspensionParams instance")
    m_s, m_us, k_s, k_us, c_s = params.m_s, params.m_us, params.k_s, params.k_us, params.c_s
    A = np.array([
        [0.0, 1.0, 0.0, 0.0],
        [-k_us / m_us, -c_s / m_us, k_s / m_us, c_s / m_us],
        [0.0, -1.0, 0.0, 1.0],
        [0.0, c_s / m_s, -k_s / m_s, -c_s / m_s],
    ])
    B = np.array([[0.0], [1.0 / m_us], [0.0], [-1.0 / m_s]])
    B_r = np.array([[-1.0], [0.0], [0.0], [0.0]])
    B_w = np.array([[-params.alpha], [0.0], [0.0], [0.0]])
    C0 = np.hstack([np.zeros((3, 1)), np.eye(3)])
    D0 = np.asarray(d0, dtype=float).reshape(3, 1)
    if not np.all(np.isfinite(D0)):
        raise ParameterError("d0 must be finite")
    return Plant(_frozen(A), _frozen(B), _frozen(B_r), _frozen(B_w), _frozen(C0), _frozen(D0), params)


def augment(
    plant: Plant,
    d_r: float = DEFAULT_DR,
    d_1: float = DEFAULT_D1,
    tau_min: float = 0.0,
    tau_max: float = 0.5,
    road_decay: float = DEFAULT_ROAD_DECAY,
) -> AugmentedDelaySystem:
    """Append the road velocity to the state and the delayed road reading to y."""
    if not (0.0 <= tau_min <= tau_max) or not math.isfinite(tau_max):
        raise DomainError(f"need 0 <= tau_min <= tau_max, got [{tau_min}, {tau_max}]")
    if not (d_r >= 0 and math.isfinite(d_r)):
        raise DomainError(f"d_r must be non-negative, got {d_r}")
    if not (road_decay >= 0 and math.isfinite(road_decay)):
        raise DomainError(f"road_decay must be non-negative, got {road_decay}")
    n = plant.A.shape[0]
    ny0 = plant.C0.shape[0]

    A_a = np.zeros((n + 1, n + 1))
    A_a[:n, :n] = plant.A
    A_a[:n, n:] = plant.B_r
    A_a[n, n] = -road_decay
    B_a = np.vstack([plant.B_w, [[d_r]]])
    C_a0 = np.zeros((ny0 + 1, n + 1))
    C_a0[:ny0, :n] = plant.C0
    C_a1 = np.zeros((ny0 + 1, n + 1))
    C_a1[ny0, n] = 1.0
    D_a = np.vstack([plant.D0, [[d_1]]])
    E_a = np.hstack([np.eye(n), np.zeros((n, 1))])
    return AugmentedDelaySystem(
        _frozen(A_a), _frozen(B_a), _frozen(C_a0), _frozen(C_a1), _frozen(D_a), _frozen(E_a),
        float(d_r), float(d_1), float(tau_min), float(tau_max), float(road_decay),
    )


def section5_system(**overrides) -> AugmentedDelaySystem:
    """Table 1 plant with the default couplings and tau in [0, 0.5] s."""
    d0 = overrides.pop("d0", DEFAULT_D0)
    return augment(build_plant(TABLE1, d0), **overrides)


# -- road profiles ------------------------------------------------------------

def _sinpi(x: np.ndarray) -> np.ndarray:
    """sin(pi * x) with exact zeros at integers and exact +-1 at half-integers."""
    r = np.fmod(x, 2.0)                      # exact
    r = np.where(r > 1.0, r - 2.0, r)        # (-1, 1]
    r = np.where(r < -1.0, r + 2.0, r)
    # fold into [-0.5, 0.5] using sin(pi - a) = sin(a)
    r = np.where(r > 0.5, 1.0 - r, r)
    r = np.where(r < -0.5, -1.0 - r, r)
    return np.sin(np.pi * r)


@dataclass(frozen=True)
class RoadSegment:
    """``amplitude * sin(omega * (t - t_start) + phase)`` on ``[t_start, t_end]``.

    ``amplitude == 0`` is the zero waveform.
    """

    t_start: float
    t_end: float
    amplitude: float = 0.0
    omega: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if not (self.t_end >= self.t_start):
            raise DomainError(f"segment ends before it starts: [{self.t_start}, {self.t_end}]")

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        if self.amplitude == 0.0:
            return np.zeros_like(t)
        x = (self.omega / math.pi) * (t - self.t_start) + self.phase / math.pi
        return self.amplitude * _sinpi(x)


@dataclass(frozen=True)
class RoadProfile:
    segments: tuple[RoadSegment, ...] = ()

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        for a, b in zip(segs, segs[1:]):
            if b.t_start <= a.t_end:
                raise DomainError("road segments must be sorted and non-overlapping")

    def __call__(self, t):
        return eval_road(self, t)


def eval_road(profile: RoadProfile, t):
    """Road velocity at time(s) ``t``; zero outside every segment."""
    arr = np.asarray(t, dtype=float)
    out = np.zeros_like(arr)
    for seg in profile.segments:
        mask = (arr >= seg.t_start) & (arr <= seg.t_end)
        if np.any(mask):
            out = np.where(mask, seg.evaluate(arr), out)
    if np.ndim(t) == 0:
        return float(out)
    return out


SECTION5_ROAD = RoadProfile((
    RoadSegment(1.0, 3.0, amplitude=0.15, omega=math.pi),
    RoadSegment(4.0, 8.0, amplitude=0.2, omega=math.pi / 2),
))
ZERO_ROAD = RoadProfile(())
