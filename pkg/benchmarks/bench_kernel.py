"""Wall-clock comparison of the compiled and pure-Python RK4 kernels.

    python3 benchmarks/bench_kernel.py [--horizon 10] [--repeat 3]
"""

import argparse
import time

import numpy as np

from delayhinf import kernels
from delayhinf.model import SECTION5_ROAD, ZERO_ROAD, section5_system
from delayhinf.simulator import DelayProfile, SimConfig, simulate
from delayhinf.synthesis import FilterGains


def demo_gains(sys_):
    # a stable stand-in filter; the benchmark times integration, not design
    n = sys_.n
    K_A = sys_.A_a - 5.0 * np.eye(n)
    K_B = np.zeros((n, sys_.ny))
    K_B[1:4, :3] = 5.0 * np.eye(3)
    return FilterGains(K_A, K_B, sys_.E_a.copy())


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--horizon", type=float, default=10.0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    sys_ = section5_system()
    gains = demo_gains(sys_)
    cases = [
        ("scenario", SECTION5_ROAD, DelayProfile.constant(0.2)),
        ("model", ZERO_ROAD, DelayProfile.sinusoid(0.25, 0.25, 2.0)),
    ]
    if kernels.BACKEND != "cython":
        print("compiled kernel not built; timing the pure-Python backend only")
    for mode, road, delay in cases:
        cfg = SimConfig(horizon=args.horizon, seed=1, mode=mode)
        row = [f"{mode:<9}", f"steps={cfg.n_steps}"]
        t_py, tr_py = best_of(lambda: simulate(sys_, gains, road, delay, cfg, backend="python"), args.repeat)
        row.append(f"python {t_py * 1e3:8.1f} ms")
        if kernels.BACKEND == "cython":
            t_cy, tr_cy = best_of(lambda: simulate(sys_, gains, road, delay, cfg, backend="cython"), args.repeat)
            diff = np.abs(tr_cy.x_a - tr_py.x_a).max()
            row += [f"cython {t_cy * 1e3:8.1f} ms", f"speedup {t_py / t_cy:6.1f}x", f"max|diff| {diff:.1e}"]
        print("  ".join(row))


if __name__ == "__main__":
    main()
