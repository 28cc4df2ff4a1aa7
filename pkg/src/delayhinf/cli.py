"""Command-line front end: ``synth``, ``verify``, ``simulate``, ``compare``.

Exit codes: 0 success / certified, 1 usage error, 2 infeasible or not
certified, 3 parse or I/O failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .exceptions import (
    CertificationFailureError,
    DelayHinfError,
    DomainError,
    FactorizationDegeneracyError,
    FormatError,
    SynthesisInfeasibleError,
)
from .model import (
    DEFAULT_D0, DEFAULT_D1, DEFAULT_DR, DEFAULT_ROAD_DECAY, SECTION5_ROAD, ZERO_ROAD,
    AugmentedDelaySystem, SuspensionParams, augment, build_plant,
)
from .simulator import (
    DelayProfile, SimConfig, SimTrace, kalman_baseline, metrics, simulate, simulate_kalman,
)
from .solver import certify
from .synthesis import (
    FilterGains, SynthesisOptions, minimize_gamma, q1_search_grid, synthesize, verify_gains,
)

log = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_IO = 0, 1, 2, 3
SCHEMA_VERSION = 1
GAINS_KIND = "delayhinf-gains"
COMPARE_KIND = "delayhinf-compare"

CSV_HEADER = (
    "t,x1,x2,x3,x4,rdot,xh1,xh2,xh3,xh4,xh5,e1,e2,e3,e4,y01,y02,y03,y1,w,tau".split(",")
)
ROADS = {"section5": SECTION5_ROAD, "zero": ZERO_ROAD}


class UsageError(DelayHinfError):
    pass


# -- config -----------------------------------------------------------------------

_SCHEMA = {
    "suspension": {"m_s", "m_us", "k_s", "k_us", "c_s", "alpha"},
    "augment": {"d_r", "d_0", "d_1", "tau_min", "tau_max", "road_decay"},
    "synthesis": {"gamma", "epsilon", "q1_min", "q1_max", "q1_count"},
    "simulation": {
        "dt", "horizon", "seed", "sigma_w", "mode", "road", "x0",
        "delay_kind", "delay_tau", "delay_mean", "delay_amplitude", "delay_period",
        "delay_seed", "delay_step_std",
    },
    "kalman": {"q_w", "r_diag"},
}


@dataclass(frozen=True)
class Config:
    params: SuspensionParams = field(default_factory=SuspensionParams)
    d_r: float = DEFAULT_DR
    d_0: tuple = DEFAULT_D0
    d_1: float = DEFAULT_D1
    tau_min: float = 0.0
    tau_max: float = 0.5
    road_decay: float = DEFAULT_ROAD_DECAY
    gamma: float = 0.5
    epsilon: float | None = None
    q1_min: float = 1e-3
    q1_max: float = 1e3
    q1_count: int = 13
    sim: SimConfig = field(default_factory=SimConfig)
    road: str = "section5"
    delay: DelayProfile = field(default_factory=lambda: DelayProfile.constant(0.2))
    q_w: float = 1.0
    r_diag: tuple = (1e-4, 1e-4, 1e-4)
    sha256: str = ""

    def system(self, tau_max: float | None = None) -> AugmentedDelaySystem:
        plant = build_plant(self.params, self.d_0)
        tm = self.tau_max if tau_max is None else tau_max
        return augment(plant, self.d_r, self.d_1, self.tau_min, tm, self.road_decay)

    def synthesis_options(self) -> SynthesisOptions:
        return SynthesisOptions(q1_grid=q1_search_grid(self.q1_min, self.q1_max, self.q1_count),
                                epsilon=self.epsilon)


def _floats(text: str) -> tuple:
    return tuple(float(x) for x in text.replace(",", " ").split())


def load_config(path) -> Config:
    """Parse and validate an INI-style config; unknown sections or keys are errors."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror or exc}") from exc
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(raw.decode("utf-8"), source=str(path))
    except (configparser.Error, UnicodeDecodeError) as exc:
        raise FormatError(f"{path}: {exc}") from exc

    for sec in cp.sections():
        if sec not in _SCHEMA:
            raise FormatError(f"{path}: unknown section [{sec}]")
        extra = set(cp[sec]) - _SCHEMA[sec]
        if extra:
            raise FormatError(f"{path}: unknown key(s) in [{sec}]: {', '.join(sorted(extra))}")

    def get(sec, key, conv, default):
        if cp.has_option(sec, key):
            try:
                return conv(cp.get(sec, key))
            except ValueError as exc:
                raise FormatError(f"{path}: [{sec}] {key}: {exc}") from exc
        return default

    try:
        base = SuspensionParams()
        params = SuspensionParams(**{k: get("suspension", k, float, getattr(base, k)) for k in _SCHEMA["suspension"]})
        d_0 = get("augment", "d_0", _floats, DEFAULT_D0)
        if len(d_0) != 3:
            raise FormatError(f"{path}: [augment] d_0 needs 3 values")
        sim = SimConfig(
            dt=get("simulation", "dt", float, 1e-3),
            horizon=get("simulation", "horizon", float, 10.0),
            seed=get("simulation", "seed", int, 0),
            sigma_w=get("simulation", "sigma_w", float, 0.01),
            mode=get("simulation", "mode", str, "scenario"),
            x0=get("simulation", "x0", _floats, None),
        )
        kind = get("simulation", "delay_kind", str, "constant")
        if kind == "constant":
            delay = DelayProfile.constant(get("simulation", "delay_tau", float, 0.2))
        elif kind == "sinusoid":
            delay = DelayProfile.sinusoid(get("simulation", "delay_mean", float, 0.25),
                                          get("simulation", "delay_amplitude", float, 0.25),
                                          get("simulation", "delay_period", float, 2.0))
        else:
            delay = DelayProfile(kind, seed=get("simulation", "delay_seed", int, 0),
                                 step_std=get("simulation", "delay_step_std", float, 0.0),
                                 tau_min=get("augment", "tau_min", float, 0.0),
                                 tau_max=get("augment", "tau_max", float, 0.5))
        road = get("simulation", "road", str, "section5")
        if road not in ROADS:
            raise FormatError(f"{path}: [simulation] road must be one of {sorted(ROADS)}")
        eps = get("synthesis", "epsilon", float, None)
        cfg = Config(
            params=params,
            d_r=get("augment", "d_r", float, DEFAULT_DR),
            d_0=d_0,
            d_1=get("augment", "d_1", float, DEFAULT_D1),
            tau_min=get("augment", "tau_min", float, 0.0),
            tau_max=get("augment", "tau_max", float, 0.5),
            road_decay=get("augment", "road_decay", float, DEFAULT_ROAD_DECAY),
            gamma=get("synthesis", "gamma", float, 0.5),
            epsilon=eps,
            q1_min=get("synthesis", "q1_min", float, 1e-3),
            q1_max=get("synthesis", "q1_max", float, 1e3),
            q1_count=get("synthesis", "q1_count", int, 13),
            sim=sim, road=road, delay=delay,
            q_w=get("kalman", "q_w", float, 1.0),
            r_diag=get("kalman", "r_diag", _floats, (1e-4, 1e-4, 1e-4)),
            sha256=hashlib.sha256(raw).hexdigest(),
        )
        # re-validate everything the modules check on construction
        cfg.system()
        cfg.synthesis_options()
        if not cfg.gamma > 0:
            raise DomainError("gamma must be positive")
        if eps is not None and not eps > 0:
            raise DomainError("epsilon must be positive")
        if len(cfg.r_diag) != 3 or min(cfg.r_diag) <= 0 or not cfg.q_w >= 0:
            raise DomainError("[kalman] needs q_w >= 0 and three positive r_diag entries")
    except DomainError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    return cfg


# -- gains artifact -------------------------------------------------------------

def _rows(a) -> list:
    return np.asarray(a, dtype=float).tolist()


def _system_dict(sys_: AugmentedDelaySystem) -> dict:
    return {
        "A_a": _rows(sys_.A_a), "B_a": _rows(sys_.B_a), "C_a0": _rows(sys_.C_a0),
        "C_a1": _rows(sys_.C_a1), "D_a": _rows(sys_.D_a), "E_a": _rows(sys_.E_a),
        "d_r": sys_.d_r, "d_1": sys_.d_1, "tau_min": sys_.tau_min, "tau_max": sys_.tau_max,
        "road_decay": sys_.road_decay,
    }


def gains_artifact(result, sys_: AugmentedDelaySystem, config_sha256: str = "") -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": GAINS_KIND,
        "dims": {"n": sys_.n, "ny": sys_.ny, "nz": sys_.nz, "nw": sys_.nw},
        "K_A": _rows(result.gains.K_A),
        "K_B": _rows(result.gains.K_B),
        "K_C": _rows(result.gains.K_C),
        "P": _rows(result.P_certified),
        "Q1": _rows(result.Q1),
        "Q2": float(np.asarray(result.Q2).reshape(-1)[0]),
        "gamma": result.gamma,
        "tau_max": result.tau_max,
        "q1_selected": result.q1_selected,
        "margin": result.margin,
        "system": _system_dict(sys_),
        "provenance": {"config_sha256": config_sha256, "tool_version": __version__},
    }


def _matrix(doc, key, shape):
    try:
        a = np.array(doc[key], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"missing or non-numeric matrix {key!r}") from exc
    if a.shape != shape or not np.all(np.isfinite(a)):
        raise FormatError(f"{key} has shape {a.shape}, expected {shape}")
    return a


@dataclass(frozen=True)
class GainsFile:
    system: AugmentedDelaySystem
    gains: FilterGains
    P: np.ndarray
    Q1: np.ndarray
    Q2: float
    gamma: float
    tau_max: float
    q1_selected: float
    margin: float
    provenance: dict


def parse_gains(doc: dict) -> GainsFile:
    if not isinstance(doc, dict) or doc.get("kind") != GAINS_KIND:
        raise FormatError("not a gains artifact")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise FormatError(f"unsupported schema_version {doc.get('schema_version')!r}")
    try:
        d = doc["dims"]
        n, ny, nz, nw = (int(d[k]) for k in ("n", "ny", "nz", "nw"))
        s = doc["system"]
        sys_ = AugmentedDelaySystem(
            _matrix(s, "A_a", (n, n)), _matrix(s, "B_a", (n, nw)), _matrix(s, "C_a0", (ny, n)),
            _matrix(s, "C_a1", (ny, n)), _matrix(s, "D_a", (ny, nw)), _matrix(s, "E_a", (nz, n)),
            float(s["d_r"]), float(s["d_1"]), float(s["tau_min"]), float(s["tau_max"]),
            float(s["road_decay"]),
        )
        gains = FilterGains(_matrix(doc, "K_A", (n, n)), _matrix(doc, "K_B", (n, ny)), _matrix(doc, "K_C", (nz, n)))
        return GainsFile(
            sys_, gains, _matrix(doc, "P", (2 * n, 2 * n)), _matrix(doc, "Q1", (n, n)),
            float(doc["Q2"]), float(doc["gamma"]), float(doc["tau_max"]),
            float(doc["q1_selected"]), float(doc["margin"]), dict(doc["provenance"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"malformed gains artifact: {exc!r}") from exc


def _read_json(path):
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror or exc}") from exc
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def load_gains(path) -> GainsFile:
    try:
        return parse_gains(_read_json(path))
    except FormatError as exc:
        if str(path) in str(exc):
            raise
        raise FormatError(f"{path}: {exc}") from exc


def _write_text(path, text: str):
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror or exc}") from exc


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


# -- trace CSV / SVG ------------------------------------------------------------

def trace_rows(trace: SimTrace) -> np.ndarray:
    return np.column_stack([
        trace.t, trace.x_a[:, :4], trace.rdot, trace.xh, trace.e, trace.y_a, trace.w, trace.tau,
    ])


def write_trace_csv(trace: SimTrace, path):
    table = trace_rows(trace)
    lines = [",".join(CSV_HEADER)]
    lines += [",".join(map(repr, row)) for row in table.tolist()]
    _write_text(path, "\n".join(lines) + "\n")


def read_trace_csv(path) -> dict:
    """Column name -> float array. Values round-trip exactly."""
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != CSV_HEADER:
                raise FormatError(f"{path}: unexpected header {header!r}")
            rows = [[float(x) for x in row] for row in reader]
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror or exc}") from exc
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if any(len(r) != len(CSV_HEADER) for r in rows):
        raise FormatError(f"{path}: ragged row")
    data = np.array(rows, dtype=float).reshape(-1, len(CSV_HEADER))
    return {name: data[:, i] for i, name in enumerate(CSV_HEADER)}


def plot_trace_svg(trace: SimTrace, path, title: str = ""):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "delayhinf", "svg.fonttype": "none"}):
        fig, axes = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
        for ax, i, name in zip(axes, (2, 3), ("x3  suspension deflection [m]", "x4  sprung mass velocity [m/s]")):
            ax.plot(trace.t, trace.x_a[:, i], label="true", lw=1.0)
            ax.plot(trace.t, trace.x_a[:, i] - trace.e[:, i], label="estimate", lw=1.0, ls="--")
            ax.set_ylabel(name)
            ax.legend(loc="upper right")
        axes[-1].set_xlabel("t [s]")
        if title:
            axes[0].set_title(title)
        fig.tight_layout()
        try:
            fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as exc:
            raise FormatError(f"{path}: {exc.strerror or exc}") from exc
        finally:
            plt.close(fig)


# -- commands -------------------------------------------------------------------

def cmd_synth(args) -> int:
    cfg = load_config(args.config)
    gamma = cfg.gamma if args.gamma is None else args.gamma
    sys_ = cfg.system(args.tau_max)
    opts = cfg.synthesis_options()
    try:
        if args.min_gamma:
            result = minimize_gamma(sys_, opts=opts)
        else:
            result = synthesize(sys_, gamma, opts)
    except SynthesisInfeasibleError as exc:
        print(f"infeasible: {exc.args[0].split(' (')[0]}", file=sys.stderr)
        if exc.margins:
            print("q1            best lambda_max", file=sys.stderr)
            for q, m in exc.margins.items():
                print(f"{q:<13.6g} {m:.6e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (CertificationFailureError, FactorizationDegeneracyError) as exc:
        print(f"not certified: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    _write_text(args.output, _dump_json(gains_artifact(result, sys_, cfg.sha256)))
    print(f"gamma       {result.gamma:.6g}")
    print(f"tau_max     {result.tau_max:.6g}")
    print(f"q1          {result.q1_selected:.6g}")
    print(f"margin      {result.margin:.6e}")
    print(f"iterations  {result.iterations}")
    print(f"wrote       {args.output}")
    return EXIT_OK


def cmd_verify(args) -> int:
    art = load_gains(args.gains)
    gamma = art.gamma if args.gamma is None else args.gamma
    tau = art.tau_max if args.tau_max is None else args.tau_max
    if not gamma > 0 or not tau >= art.system.tau_min:
        raise UsageError("need gamma > 0 and tau_max >= tau_min")
    problem, cert = verify_gains(art.system.with_tau_max(tau), art.gains, gamma, tau)
    check = certify(problem, cert.values)
    stored = {"P": art.P}
    if tau > 0:
        stored.update(Q1=art.Q1, Q2=np.array([[art.Q2]]))
    stored_check = certify(problem, stored)
    ok = (cert.feasible and check < 0) or stored_check < -problem.epsilon
    print(f"gamma       {gamma:.6g}")
    print(f"tau_max     {tau:.6g}")
    print(f"status      {cert.status}")
    print(f"margin      {cert.margin:.6e}")
    print(f"certify     {check:.6e}")
    print(f"stored      {stored_check:.6e}")
    for w in cert.warnings:
        print(f"warning     {w}")
    print("certified" if ok else "NOT certified")
    return EXIT_OK if ok else EXIT_INFEASIBLE


def _sim_inputs(args):
    art = load_gains(args.gains)
    cfg = load_config(args.config)
    sys_ = cfg.system()
    if (sys_.n, sys_.ny, sys_.nz) != (art.system.n, art.system.ny, art.system.nz):
        raise FormatError("gains artifact and config describe different dimensions")
    return art, cfg, sys_


def cmd_simulate(args) -> int:
    art, cfg, sys_ = _sim_inputs(args)
    delay = cfg.delay if args.delay is None else DelayProfile.constant(args.delay)
    sim = cfg.sim if args.seed is None else SimConfig(cfg.sim.dt, cfg.sim.horizon, args.seed, cfg.sim.sigma_w,
                                                      cfg.sim.mode, cfg.sim.x0)
    trace = simulate(sys_, art.gains, ROADS[cfg.road], delay, sim)
    write_trace_csv(trace, args.output)
    if args.plot:
        plot_trace_svg(trace, args.plot, title=f"seed {sim.seed}")
    m = metrics(trace, art.gamma)
    print(f"rows        {len(trace)}")
    print("rmse        " + " ".join(f"{v:.4e}" for v in m.rmse))
    print(f"wrote       {args.output}")
    return EXIT_OK


def _parse_delays(text: str) -> tuple:
    try:
        delays = _floats(text)
    except ValueError as exc:
        raise UsageError(f"--delays: {exc}") from exc
    if not delays:
        raise UsageError("--delays is empty")
    return delays


def _paired_run(job):
    sys_, gains, plant, kb, road, delay, sim = job
    dp = DelayProfile.constant(delay)
    h = metrics(simulate(sys_, gains, road, dp, sim)).rmse
    k = metrics(simulate_kalman(plant, kb, road, sim, sys_, dp)).rmse
    return h, k


def compare(sys_, gains, plant, kb, road, sim: SimConfig, delays, seeds, workers=None) -> dict:
    """Paired H-infinity vs Kalman runs over ``delays x seeds``; per-delay medians."""
    jobs = {}
    for d in delays:
        for s in seeds:
            cfg = SimConfig(sim.dt, sim.horizon, s, sim.sigma_w, sim.mode, sim.x0)
            jobs[(d, s)] = (sys_, gains, plant, kb, road, d, cfg)
    keys = sorted(jobs)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = dict(zip(keys, pool.map(_paired_run, [jobs[k] for k in keys])))
    out = []
    for d in sorted(set(delays)):
        h = np.array([results[(d, s)][0] for s in seeds])
        k = np.array([results[(d, s)][1] for s in seeds])
        hm, km = np.median(h, axis=0), np.median(k, axis=0)
        wins = {name: bool(hm[i] < km[i]) for i, name in ((2, "x3"), (3, "x4"))}
        if all(wins.values()):
            verdict = "hinf"
        elif not any(wins.values()):
            verdict = "kalman"
        else:
            verdict = "mixed"
        out.append({
            "delay": d,
            "hinf": {"rmse_x3": float(hm[2]), "rmse_x4": float(hm[3])},
            "kalman": {"rmse_x3": float(km[2]), "rmse_x4": float(km[3])},
            "hinf_better": wins,
            "verdict": verdict,
        })
    return {"schema_version": SCHEMA_VERSION, "kind": COMPARE_KIND, "seeds": list(seeds), "results": out}


def load_compare(path) -> dict:
    doc = _read_json(path)
    if not isinstance(doc, dict) or doc.get("kind") != COMPARE_KIND or doc.get("schema_version") != SCHEMA_VERSION:
        raise FormatError(f"{path}: not a compare summary")
    return doc


def cmd_compare(args) -> int:
    if args.seeds < 1:
        raise UsageError("--seeds must be at least 1")
    delays = _parse_delays(args.delays)
    art, cfg, sys_ = _sim_inputs(args)
    plant = build_plant(cfg.params, cfg.d_0)
    kb = kalman_baseline(plant, cfg.q_w, cfg.r_diag)
    seeds = [cfg.sim.seed + i for i in range(args.seeds)]
    doc = compare(sys_, art.gains, plant, kb, ROADS[cfg.road], cfg.sim, delays, seeds, args.workers)
    doc["provenance"] = {"config_sha256": cfg.sha256, "tool_version": __version__}
    _write_text(args.output, _dump_json(doc))
    for r in doc["results"]:
        print(f"delay {r['delay']:<6g} hinf x3 {r['hinf']['rmse_x3']:.4e} x4 {r['hinf']['rmse_x4']:.4e}  "
              f"kalman x3 {r['kalman']['rmse_x3']:.4e} x4 {r['kalman']['rmse_x4']:.4e}  -> {r['verdict']}")
    return EXIT_OK


# -- entry point ------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="delayhinf", description="H-infinity filters with a delayed auxiliary measurement.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", help="design and certify a filter")
    s.add_argument("config")
    s.add_argument("--gamma", type=float)
    s.add_argument("--tau-max", type=float)
    s.add_argument("--min-gamma", action="store_true", help="bisect for the smallest certified gamma")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_synth)

    v = sub.add_parser("verify", help="re-certify stored gains")
    v.add_argument("gains")
    v.add_argument("--gamma", type=float)
    v.add_argument("--tau-max", type=float)
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("simulate", help="simulate and write a trace CSV")
    m.add_argument("gains")
    m.add_argument("config")
    m.add_argument("--delay", type=float, help="constant delay overriding the config")
    m.add_argument("--seed", type=int)
    m.add_argument("-o", "--output", required=True)
    m.add_argument("--plot", help="optional SVG of x3 and x4 against their estimates")
    m.set_defaults(func=cmd_simulate)

    c = sub.add_parser("compare", help="paired runs against the Kalman baseline")
    c.add_argument("gains")
    c.add_argument("config")
    c.add_argument("--delays", default="0.0,0.2")
    c.add_argument("--seeds", type=int, default=10)
    c.add_argument("--workers", type=int)
    c.add_argument("-o", "--output", required=True)
    c.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DomainError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
