"""Command-line front end: ``ascpg run | slope | verify``.

Exit codes: 0 success, 2 invalid config or arguments, 3 a run diverged
(partial outputs are kept), 4 the slope window holds nonpositive values,
5 a property check failed.
"""
import argparse
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import harness
from .checks import run_checks
from .config import AXIS_NAMES, ConfigError, dumps_config, load_config, parse_window
from .errors import ConstructionError, InvalidArgument, UnsupportedOperation
from .metrics import NonpositiveSeries, aggregate, fit_slope, read_aggregate_csv, write_aggregate_csv, write_slope_json
from .problems import FAMILY_DEFAULTS, BellmanOracle, ProblemSpec, load_mdp

OUT_ENV = "ASCPG_OUT"
DEFAULT_OUT = "ascpg-out"

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_SLOPE, EXIT_CHECK = 0, 2, 3, 4, 5


def _err(msg):
    print(f"ascpg: {msg}", file=sys.stderr)


def out_dir(flag):
    return Path(flag or os.environ.get(OUT_ENV) or DEFAULT_OUT)


def _reference(cfg, problem, solver):
    """Fixed point the distance column is measured to, or ``None`` for the solution-set projection."""
    mode = cfg.reference
    probe = problem(0)
    if mode == "auto":
        if solver.regularizer.kind == "zero" and probe.truth is not None and probe.truth.has_solution_set:
            return None
        mode = "exact" if probe.truth is not None else "long"
    if mode == "projection":
        if probe.truth is None or not probe.truth.has_solution_set:
            raise UnsupportedOperation(f"{cfg.problem.family} has no solution-set projection")
        if solver.regularizer.kind != "zero":
            raise UnsupportedOperation("the solution-set projection ignores the regularizer; use reference = exact")
        return None
    return harness.reference_solution(problem, solver, iters=cfg.reference_iters, mode=mode)


def _tune(cfg, solver, reference, log):
    """Pick ``(c_a, c_b)`` per method from the ``[sweep]`` grid; returns ``{method: SolverConfig}``."""
    chosen, report = {}, {}
    sw = cfg.sweep
    for m in cfg.methods:
        base = replace(solver, method=m, max_iters=sw.K, trace_stride=sw.K)
        grid = [replace(base.schedule, c_a=ca, c_b=cb) for ca in sw.c_a for cb in sw.c_b]
        scored = harness.sweep(cfg.problem, base, grid, sw.seeds, cfg.field, cfg.workers, reference)
        best_score, best = scored[0]
        if math.isinf(best_score):
            log(f"{m}: every sweep point diverged; keeping c_a={solver.schedule.c_a}, c_b={solver.schedule.c_b}")
            best = solver.schedule
        chosen[m] = replace(solver, method=m, schedule=best)
        report[m] = {
            "c_a": best.c_a, "c_b": best.c_b,
            "scores": [{"c_a": s.c_a, "c_b": s.c_b, "score": None if math.isinf(v) else v} for v, s in scored],
        }
        log(f"{m}: sweep picked c_a={best.c_a:g}, c_b={best.c_b:g}")
    return chosen, report


def cmd_run(args):
    try:
        cfg = load_config(args.config)
        if args.workers is not None:
            if args.workers < 1:
                raise ConfigError("--workers must be >= 1", "command line")
            cfg = replace(cfg, workers=args.workers)
        if args.axis is not None:
            cfg = replace(cfg, axis=args.axis)
        if args.window is not None:
            cfg = replace(cfg, window=parse_window(args.window))
    except InvalidArgument as err:
        _err(str(err))
        return EXIT_CONFIG

    out = out_dir(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "effective.cfg").write_text(dumps_config(cfg))
    log = lambda msg: print(msg, file=sys.stderr)  # noqa: E731

    try:
        reference = _reference(cfg, cfg.problem, cfg.solver)
    except ConstructionError as err:
        _err(f"{args.config}: [problem] {err}")
        return EXIT_CONFIG
    except (UnsupportedOperation, InvalidArgument) as err:
        _err(f"{args.config}: [run] reference: {err}")
        return EXIT_CONFIG

    if cfg.sweep is not None:
        solvers, report = _tune(cfg, cfg.solver, reference, log)
        with open(out / "sweep.json", "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        solvers = {m: replace(cfg.solver, method=m) for m in cfg.methods}

    jobs = [(cfg.problem, replace(solvers[m], seed=s), reference) for m in cfg.methods for s in cfg.seeds]
    results = harness.run_jobs(jobs, cfg.workers)
    diverged = []
    for r in results:
        r.trace.to_csv(out / f"trace_{r.method}_seed{r.seed}.csv")
        if not r.ok:
            diverged.append(r)

    axis = AXIS_NAMES[cfg.axis]
    for m in cfg.methods:
        mine = [r for r in results if r.method == m]
        if any(not r.ok for r in mine):
            continue
        series = aggregate([r.trace for r in mine], cfg.field, axis)
        write_aggregate_csv(series, out / f"aggregate_{m}.csv")
        try:
            fit = fit_slope(series, cfg.window)
        except InvalidArgument as err:
            log(f"{m}: no slope fit ({err})")
            continue
        sched = solvers[m].schedule
        write_slope_json(fit, out / f"slope_{m}.json", method=m, field=cfg.field, axis=cfg.axis,
                         n_seeds=len(mine), c_a=sched.c_a, c_b=sched.c_b, a=sched.a, b=sched.b,
                         terminal_mean=float(series.mean[-1]))
        print(f"{m}: slope {fit.slope:.4f}  r2 {fit.r2:.4f}  terminal mean {series.mean[-1]:.4g}  n={len(mine)}")

    if diverged:
        for r in diverged:
            _err(f"{r.method} seed {r.seed} diverged at k={r.diverged_at}")
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_slope(args):
    try:
        series = read_aggregate_csv(args.aggregate)
        window = parse_window(args.window) if args.window else None
    except (OSError, InvalidArgument) as err:
        _err(str(err))
        return EXIT_CONFIG
    try:
        fit = fit_slope(series, window)
    except NonpositiveSeries as err:
        _err(f"{args.aggregate}: {err}")
        return EXIT_SLOPE
    except InvalidArgument as err:
        _err(f"{args.aggregate}: {err}")
        return EXIT_CONFIG
    print(f"slope {fit.slope:.6f}  intercept {fit.intercept:.6f}  r2 {fit.r2:.6f}  "
          f"window [{fit.window[0]:g}, {fit.window[1]:g}]  points {fit.n_points}")
    src = Path(args.aggregate)
    dest = Path(args.out) if args.out else src.parent
    dest.mkdir(parents=True, exist_ok=True)
    write_slope_json(fit, dest / f"slope_{src.stem}.json", source=str(src))
    return EXIT_OK


def _verify_oracle(args):
    family = "random_mdp" if args.family == "bellman" else args.family
    if args.fixture:
        if family not in ("random_mdp", "baird"):
            raise InvalidArgument("--fixture only applies to the Bellman families")
        if args.param:
            raise InvalidArgument("--param cannot be combined with --fixture")
        return BellmanOracle(load_mdp(args.fixture, validate=False), seed=args.seed)
    params = {}
    for item in args.param or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise InvalidArgument(f"--param expects key=value, got {item!r}")
        params[key.strip()] = value.strip()
    return ProblemSpec(family, params).build(args.seed)


def cmd_verify(args):
    try:
        oracle = _verify_oracle(args)
    except (OSError, InvalidArgument, ConstructionError) as err:
        _err(str(err))
        return EXIT_CONFIG
    results = run_checks(oracle, seed=args.seed, n_draws=args.draws)
    failed = [r.name for r in results if not r.passed]
    report = {"family": args.family, "seed": args.seed, "passed": not failed,
              "failed": failed, "checks": [r.to_dict() for r in results]}
    for r in results:
        print(r.line(), file=sys.stderr)
    text = json.dumps(report, indent=2)
    print(text)
    if args.out:
        dest = Path(args.out)
        dest.mkdir(parents=True, exist_ok=True)
        (dest / f"verify_{args.family}_seed{args.seed}.json").write_text(text + "\n")
    if failed:
        _err(f"failed check: {failed[0]}" + (f" (and {len(failed) - 1} more)" if len(failed) > 1 else ""))
        return EXIT_CHECK
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="ascpg", description="Stochastic compositional proximal gradient experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run every (method, seed) pair of a config")
    r.add_argument("--config", required=True, help="experiment config file")
    r.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})")
    r.add_argument("--workers", type=int, help="parallel worker processes (overrides the config)")
    r.add_argument("--axis", choices=sorted(AXIS_NAMES), help="aggregate against iterations or oracle queries")
    r.add_argument("--window", help="slope fit window 'lo,hi' on the chosen axis")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("slope", help="fit a log-log slope to an aggregate CSV")
    s.add_argument("aggregate", help="aggregate CSV written by 'run'")
    s.add_argument("--window", help="fit window 'lo,hi' (default: geometric upper half)")
    s.add_argument("--out", help="directory for the slope JSON (default: next to the aggregate)")
    s.set_defaults(func=cmd_slope)

    v = sub.add_parser("verify", help="run the property checks of a problem family")
    v.add_argument("family", choices=sorted(FAMILY_DEFAULTS) + ["bellman"])
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--param", action="append", metavar="KEY=VALUE", help="family parameter (repeatable)")
    v.add_argument("--fixture", help="MDP fixture file to check instead of a generated instance")
    v.add_argument("--draws", type=int, default=10_000, help="samples per point for the statistical checks")
    v.add_argument("--out", help="also write the JSON report into this directory")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
