import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from delayhinf import kernels
from delayhinf.exceptions import DelayContractError, DomainError
from delayhinf.model import SECTION5_ROAD, ZERO_ROAD, Plant, build_plant, section5_system
from delayhinf.simulator import (
    DelayProfile, SimConfig, SimTrace, kalman_baseline, metrics, simulate, simulate_kalman,
)
from delayhinf.synthesis import FilterGains

BACKENDS = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])


def free_response(A, dt, backend):
    n = A.shape[0]
    N = int(round(1.0 / dt))
    z0 = np.eye(n)[0]
    stages = np.zeros((N, 3))
    Z, _ = kernels.rk4_delay(A, np.zeros(n), np.zeros(n), np.zeros(n), np.zeros(N), stages, stages,
                             stages, -1, dt, z0, backend=backend)
    return Z[-1]


@pytest.mark.parametrize("backend", BACKENDS)
def test_rk4_fourth_order(sys5, backend):
    ref = scipy.linalg.expm(sys5.A_a)[:, 0]
    err = [np.abs(free_response(sys5.A_a, dt, backend) - ref).max() for dt in (0.01, 0.005)]
    assert 12 <= err[0] / err[1] <= 20


def test_zero_road_equilibrium(sys5):
    cfg = SimConfig(horizon=1.0, sigma_w=0.0)
    tr = simulate(sys5, FilterGains.zeros(sys5), ZERO_ROAD, DelayProfile.constant(0.2), cfg)
    for arr in (tr.x_a, tr.xh, tr.y_a, tr.e, tr.w):
        assert not arr.any()


def test_scenario_reads_delayed_road(sys5):
    cfg = SimConfig(horizon=2.0, sigma_w=0.0)
    tr = simulate(sys5, FilterGains.zeros(sys5), SECTION5_ROAD, DelayProfile.constant(0.2), cfg)
    k = int(round(1.7 / cfg.dt))
    assert tr.y_a[k, 3] == pytest.approx(0.15, abs=1e-15)
    assert tr.rdot[k] == pytest.approx(0.15 * math.sin(0.7 * math.pi), abs=1e-15)


@pytest.mark.parametrize("mode", ["model", "scenario"])
def test_zero_delay_reads_current_road(mode):
    sys_ = section5_system(d_1=0.0)
    cfg = SimConfig(horizon=2.0, mode=mode, seed=3)
    tr = simulate(sys_, FilterGains.zeros(sys_), SECTION5_ROAD, DelayProfile.constant(0.0), cfg)
    np.testing.assert_array_equal(tr.y_a[:, 3], tr.rdot)


def test_model_mode_delay_is_exact_shift():
    sys_ = section5_system(d_1=0.0)
    cfg = SimConfig(horizon=1.0, mode="model", seed=5, sigma_w=0.1)
    tr = simulate(sys_, FilterGains.zeros(sys_), ZERO_ROAD, DelayProfile.constant(0.2), cfg)
    lag = 200
    np.testing.assert_array_equal(tr.y_a[lag:, 3], tr.rdot[:-lag])
    assert not tr.y_a[:lag, 3].any()
    assert tr.rdot[:-lag].any()


def test_deterministic(design, sys5):
    cfg = SimConfig(horizon=2.0, seed=11)
    a = simulate(sys5, design.gains, SECTION5_ROAD, DelayProfile.sinusoid(0.25, 0.2, 3.0), cfg)
    b = simulate(sys5, design.gains, SECTION5_ROAD, DelayProfile.sinusoid(0.25, 0.2, 3.0), cfg)
    for name in ("x_a", "xh", "y_a", "e", "w", "tau"):
        np.testing.assert_array_equal(getattr(a, name), getattr(b, name))


@pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled kernel not built")
@pytest.mark.parametrize("mode", ["model", "scenario"])
def test_backends_agree(design, sys5, mode):
    cfg = SimConfig(horizon=2.0, seed=2, mode=mode)
    delay = DelayProfile.sinusoid(0.25, 0.2, 1.3)
    a = simulate(sys5, design.gains, SECTION5_ROAD, delay, cfg, backend="python")
    b = simulate(sys5, design.gains, SECTION5_ROAD, delay, cfg, backend="cython")
    scale = np.abs(a.x_a).max()
    assert np.abs(a.x_a - b.x_a).max() <= 1e-12 * scale
    assert np.abs(a.e - b.e).max() <= 1e-12 * max(scale, np.abs(a.xh).max())


def test_unknown_backend(sys5):
    with pytest.raises(ValueError):
        simulate(sys5, FilterGains.zeros(sys5), ZERO_ROAD, DelayProfile.constant(0.1),
                 SimConfig(horizon=0.1), backend="fortran")


def test_delay_contract(sys5):
    gains = FilterGains.zeros(sys5)
    with pytest.raises(DelayContractError):
        simulate(sys5, gains, ZERO_ROAD, DelayProfile.constant(0.6), SimConfig(horizon=0.1))
    with pytest.raises(DelayContractError):
        simulate(sys5, gains, ZERO_ROAD, DelayProfile.sinusoid(0.3, 0.3, 1.0), SimConfig(horizon=1.0))
    narrow = section5_system(tau_min=0.01)
    with pytest.raises(DelayContractError):
        simulate(narrow, FilterGains.zeros(narrow), ZERO_ROAD, DelayProfile.constant(0.1),
                 SimConfig(dt=0.02, horizon=1.0))


@pytest.mark.parametrize("kw", [dict(dt=0.0), dict(horizon=0.0), dict(sigma_w=-1.0), dict(mode="replay")])
def test_sim_config_validation(kw):
    with pytest.raises(DomainError):
        SimConfig(**kw)


@given(seed=st.integers(0, 2 ** 31), std=st.floats(0.0, 0.5), lo=st.floats(0.0, 0.3), width=st.floats(0.0, 0.3))
@settings(max_examples=50, deadline=None)
def test_random_walk_within_bounds(seed, std, lo, width):
    prof = DelayProfile.random_walk(seed, std, lo, lo + width)
    tau, tau_st = prof.grid(200, 1e-3)
    for a in (tau, tau_st):
        assert a.min() >= lo and a.max() <= lo + width


def scalar_plant():
    one = np.ones((1, 1))
    return Plant(-one, 0 * one, 0 * one, one, one, 0 * one)


def test_kalman_scalar_care():
    kb = kalman_baseline(scalar_plant(), q_w=1.0, r_diag=(1.0,))
    assert kb.P_care[0, 0] == pytest.approx(math.sqrt(2) - 1, rel=1e-12)
    assert kb.L[0, 0] == pytest.approx(math.sqrt(2) - 1, rel=1e-12)


def test_kalman_zero_process_noise():
    kb = kalman_baseline(build_plant(), q_w=0.0)
    assert np.abs(kb.P_care).max() < 1e-12


def test_kalman_observer_hurwitz():
    plant = build_plant()
    kb = kalman_baseline(plant)
    assert np.linalg.eigvals(plant.A - kb.L @ plant.C0).real.max() < 0
    np.testing.assert_allclose(kb.P_care, kb.P_care.T)
    assert np.linalg.eigvalsh(kb.P_care)[0] > -1e-12


@pytest.mark.parametrize("kw", [dict(q_w=-1.0), dict(r_diag=(1e-4, 1e-4)), dict(r_diag=(1e-4, 0.0, 1e-4))])
def test_kalman_domain(kw):
    with pytest.raises(DomainError):
        kalman_baseline(build_plant(), **kw)


def test_kalman_shares_disturbance(design, sys5):
    cfg = SimConfig(horizon=1.0, seed=9)
    delay = DelayProfile.constant(0.2)
    a = simulate(sys5, design.gains, SECTION5_ROAD, delay, cfg)
    b = simulate_kalman(build_plant(), kalman_baseline(build_plant()), SECTION5_ROAD, cfg, sys5, delay)
    np.testing.assert_array_equal(a.w, b.w)
    np.testing.assert_array_equal(a.x_a, b.x_a)
    np.testing.assert_array_equal(a.y_a, b.y_a)
    assert b.label == "kalman"


def make_trace(e, w, T=1.0):
    N = len(w)
    t = np.linspace(0.0, T, N)
    z = np.zeros((N, 5))
    return SimTrace(t, z, z, np.zeros((N, 4)), np.asarray(e, dtype=float), np.asarray(w, dtype=float), np.zeros(N))


def test_metrics_zero_error():
    m = metrics(make_trace(np.zeros((11, 4)), np.ones(11)))
    assert m.ratio_defined and m.energy_ratio == 0.0
    assert not m.rmse.any()


def test_metrics_undefined_without_disturbance():
    m = metrics(make_trace(np.ones((11, 4)), np.zeros(11)))
    assert not m.ratio_defined and m.energy_ratio is None


def test_metrics_constant_error():
    e = np.zeros((11, 4))
    e[:, 0] = 0.1
    m = metrics(make_trace(e, np.ones(11)), gamma=0.5)
    assert m.energy_ratio == pytest.approx(0.01, rel=1e-12)
    assert m.rmse[0] == pytest.approx(0.1, rel=1e-12)
    assert m.peak[0] == pytest.approx(0.1)
    assert m.as_dict()["gamma"] == 0.5


def test_filter_starts_at_true_state(design, sys5):
    x0 = (0.01, 0.0, -0.02, 0.0, 0.0)
    tr = simulate(sys5, design.gains, ZERO_ROAD, DelayProfile.constant(0.1),
                  SimConfig(horizon=0.1, mode="model", sigma_w=0.0, x0=x0))
    np.testing.assert_array_equal(tr.xh[0], np.array(x0))
    np.testing.assert_array_equal(tr.x_a[0], np.array(x0))
