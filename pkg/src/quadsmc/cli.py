"""Command-line harness: ``quadsmc simulate|tune|check``.

Exit codes: 0 success, 1 failed check, 2 bad config or precondition,
3 simulation diverged (the partial log is still written).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import checks, config as cfgmod
from .config import ConfigError
from .control import LOOPS
from .sim import NonFiniteState, SimLog, metrics, run
from .svgplot import projection_3d, tracking_figure
from .tune import PENALTY, nelder_mead, optimize, trace_csv

log = logging.getLogger("quadsmc")

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_DIVERGED = 0, 1, 2, 3
UNITS = {"phi": "rad", "theta": "rad", "psi": "rad", "x": "m", "y": "m", "z": "m"}


def _load(path):
    try:
        return cfgmod.load(path)
    except FileNotFoundError as exc:
        log.error("%s", exc)
    except ConfigError as exc:
        log.error("config error: %s", exc)
    return None


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_plots(simlog: SimLog, out: Path) -> list[Path]:
    if simlog.mode == "attitude":
        channels = ("phi", "theta", "psi")
    else:
        channels = ("psi", "x", "y", "z")
    written = []
    for name in channels:
        j = LOOPS.index(name)
        svg = tracking_figure(
            simlog.t, simlog.ref[:, j], simlog.state[:, 2 * j], simlog.errors[:, j], name, UNITS[name]
        )
        path = out / f"{name}.svg"
        path.write_text(svg)
        written.append(path)
    if simlog.mode == "position":
        path = out / "trajectory_3d.svg"
        path.write_text(projection_3d(simlog.ref[:, 3:6], simlog.state[:, [6, 8, 10]]))
        written.append(path)
    return written


def _write_outputs(simlog: SimLog, out: Path) -> None:
    simlog.to_csv(out / "log.csv")
    simlog.diagnostics_csv(out / "diagnostics.csv")
    _dump_json(metrics(simlog), out / "metrics.json")
    write_plots(simlog, out)


def cmd_simulate(config_path, out_dir=None) -> int:
    cfg = _load(config_path)
    if cfg is None:
        return EXIT_CONFIG
    out = Path(out_dir or cfg.output_dir or "out")
    out.mkdir(parents=True, exist_ok=True)
    try:
        simlog = run(cfg.sim, cfg.params, cfg.gains, cfg.trajectory)
    except NonFiniteState as exc:
        log.error("simulation diverged: %s", exc)
        if exc.log is not None and len(exc.log):
            _write_outputs(exc.log, out)
        return EXIT_DIVERGED
    _write_outputs(simlog, out)
    m = metrics(simlog)
    log.info("wrote %s (%d rows), total ISE %.6g", out / "log.csv", len(simlog), m["total_ise"])
    return EXIT_OK


def _selftest(budget: int, seed: int, spread: float):
    def f(x):
        return float((x[0] - 5.0) ** 2)

    return nelder_mead(f, [0.2285737], [0.0], [1000.0], budget, seed, spread=spread)


def cmd_tune(config_path, out_dir=None, seed=None) -> int:
    cfg = _load(config_path)
    if cfg is None:
        return EXIT_CONFIG
    if cfg.tune is None:
        log.error("config has no 'tune' block")
        return EXIT_CONFIG
    t = cfg.tune
    seed = t.seed if seed is None else seed
    dim = 1 if t.selftest else len(t.free)
    if t.budget < dim + 1:
        log.error("tune.budget must be >= %d", dim + 1)
        return EXIT_CONFIG
    out = Path(out_dir or cfg.output_dir or "out")
    out.mkdir(parents=True, exist_ok=True)

    if t.selftest:
        x, fx, trace = _selftest(t.budget, seed, t.spread)
        (out / "trace.csv").write_text(trace_csv(trace, ["g"]))
        _dump_json({"selftest": True, "best": float(x[0]), "objective": fx, "evaluations": len(trace)},
                   out / "best_gains.json")
        log.info("selftest minimum at %.6g", x[0])
        return EXIT_OK

    problem = cfg.tune_problem()
    best, trace = optimize(problem, t.budget, seed, spread=t.spread)
    (out / "trace.csv").write_text(trace_csv(trace, problem.free))
    baseline = trace[0].f
    best_j = min(e.f for e in trace)
    _dump_json(
        {
            "gains": best.to_dict(),
            "objective": best_j,
            "baseline_objective": baseline,
            "evaluations": len(trace),
            "seed": seed,
            "free": list(problem.free),
            "diverged_evaluations": sum(1 for e in trace if e.f >= PENALTY),
        },
        out / "best_gains.json",
    )
    log.info("best objective %.6g (baseline %.6g) after %d evaluations", best_j, baseline, len(trace))
    return EXIT_OK


def cmd_check(config_path, seed=None) -> int:
    cfg = _load(config_path)
    if cfg is None:
        return EXIT_CONFIG
    seed = cfg.check_seed if seed is None else seed
    try:
        results = checks.run_all(cfg.params, cfg.constants_override, cfg.check_samples, seed)
    except (TypeError, ValueError) as exc:
        log.error("check setup failed: %s", exc)
        return EXIT_CONFIG
    ok = True
    for name, (passed, detail) in results.items():
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
        ok &= passed
    return EXIT_OK if ok else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quadsmc", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("simulate", "tune", "check"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config path or bundled config name")
        p.add_argument("--out", default=None, help="output directory (simulate, tune)")
        p.add_argument("--seed", type=int, default=None, help="overrides the config seed (tune, check)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    if args.command == "simulate":
        return cmd_simulate(args.config, args.out)
    if args.command == "tune":
        return cmd_tune(args.config, args.out, args.seed)
    return cmd_check(args.config, args.seed)


if __name__ == "__main__":
    sys.exit(main())
