"""Command-line interface: ``salss <command> ...`` (see ``salss --help``)."""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import backend, scenarios
from .builtins import NAMES, builtin
from .errors import InvalidModel, NotFound, ParseError, SaError
from .lss import LssScheduler
from .model import load, validate
from .observe import ALL_CLASSES, SchedulerClass
from .oracle import named_strategy, strategies
from .smc import CSV_FIELDS, EstimationParams, estimate, lss_experiment, okamoto_runs, to_csv

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
FAST = {"m": 1000, "epsilon": 0.05}
CLASS_HELP = "one of: " + " ".join(c.spec for c in ALL_CLASSES)


class UsageError(Exception):
    pass


def _seed(args) -> int:
    raw = args.seed if args.seed is not None else os.environ.get("SA_LSS_SEED", "1")
    try:
        seed = int(raw)
    except ValueError:
        raise UsageError(f"seed must be a decimal integer, got {raw!r}") from None
    if not 0 <= seed < 1 << 64:
        raise UsageError("seed must be a 64-bit unsigned integer")
    return seed


def _model(src: str):
    if src.upper() in NAMES:
        return builtin(src)
    path = Path(src)
    if not path.exists():
        raise UsageError(f"unknown model {src!r}: expected one of {', '.join(NAMES)} or a JSON file")
    return load(path)


def _class(text: str) -> SchedulerClass:
    try:
        return SchedulerClass.parse(text)
    except ValueError as exc:
        raise UsageError(f"{exc}\nvalid classes: {CLASS_HELP}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _format_results(results, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(results)
    if fmt == "json":
        return json.dumps([r.row() for r in results], indent=2, ensure_ascii=False) + "\n"
    lines = ["| " + " | ".join(CSV_FIELDS) + " |", "|" + "---|" * len(CSV_FIELDS)]
    for r in results:
        row = r.row()
        lines.append("| " + " | ".join(str(row[f]) for f in CSV_FIELDS) + " |")
    return "\n".join(lines) + "\n"


def _params(args, epsilon=None) -> EstimationParams:
    return EstimationParams(
        epsilon=epsilon if epsilon is not None else args.epsilon, delta=args.delta,
        max_steps=args.max_steps, master_seed=_seed(args), strict=getattr(args, "strict", False),
        jobs=max(1, args.jobs),
    )


# --------------------------------------------------------------------------- commands

def cmd_models(args) -> int:
    for name in NAMES:
        print(builtin(name).summary())
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        model = load(args.src, strict=False) if Path(args.src).exists() else _model(args.src)
    except ParseError as exc:
        print(f"{args.src}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    problems = validate(model)
    for v in problems:
        print(f"{v.code}: {v.message}")
    if not problems:
        print(f"{model.name}: valid")
    return EXIT_FAIL if problems else EXIT_OK


def cmd_simulate(args) -> int:
    model = _model(args.model)
    goal = model.goal(args.goal)
    params = EstimationParams(epsilon=0.5, delta=args.delta, max_steps=args.max_steps,
                              master_seed=_seed(args), strict=args.strict)
    if args.strategy:
        try:
            sched = named_strategy(model.name, args.strategy)
        except NotFound as exc:
            raise UsageError(str(exc)) from None
        label = sched.rule_id
    elif args.scheduler_id is not None:
        sched = LssScheduler(args.scheduler_id, _class(args.cls or ""), args.n)
        label = f"{sched.cls.spec} id={sched.id} n={sched.n}"
    else:
        raise UsageError("simulate needs --strategy or --scheduler-id with --class")
    est = estimate(model, goal, sched, args.runs, params)
    print(f"{model.name} {label}: p = {est.p_hat:.4f} ± {est.half_width:.4f} "
          f"(runs={est.runs}, reached={est.reached}, truncated={est.truncated}, delta={args.delta})")
    return EXIT_OK


def cmd_strategies(args) -> int:
    for model, rule in strategies():
        s = named_strategy(model, rule)
        print(f"{model}  {rule}  [{s.cls.spec}]  {s.description}")
    return EXIT_OK


def cmd_lss(args) -> int:
    model = _model(args.model)
    cls = _class(args.cls)
    if args.n < 1 or args.m < 1:
        raise UsageError("--n and -m must be positive")
    res = lss_experiment(model, args.goal, cls, args.n, args.m, _params(args))
    _emit(_format_results([res], args.format), args.out)
    return EXIT_OK


def _progress(verbose: bool):
    if not verbose:
        return None
    def report(r):
        print(f"  {r.model} {r.cls.spec:9} n={r.n}: ({r.p_min:.3f}, {r.p_max:.3f})", file=sys.stderr)
    return report


def _ordering_lines(reports) -> tuple[list[str], bool]:
    return [r.line() for r in reports], all(r.passed for r in reports)


def _fast_reports(runner):
    """Fast preset: every proven ordering must hold up to the 2·epsilon slack."""
    out = []
    for s in scenarios.ORDERINGS:
        rel = "weak" if s.relation == "strict" else s.relation
        ps = scenarios.best_pmax(runner, s.model, s.stronger)
        pw = scenarios.best_pmax(runner, s.model, s.weaker)
        out.append(scenarios.compare(s.model, s.stronger, s.weaker, rel, ps, pw, runner.params.epsilon))
    return out


def cmd_table(args) -> int:
    m, eps = (FAST["m"], FAST["epsilon"]) if args.fast else (args.m, args.epsilon)
    runner = scenarios.Runner(_params(args, eps), m, args.goal, _progress(args.verbose))
    t0 = time.perf_counter()
    cells = scenarios.run_fig8(runner)
    if args.format == "text":
        text = scenarios.render_fig8(cells)
    else:
        results = [runner.cache[k] for k in sorted(runner.cache, key=_cache_order)]
        text = _format_results(results, args.format)
    _emit(text, args.out)
    if args.verbose:
        print(f"[{backend.NAME} backend, m={m}, epsilon={eps}, {time.perf_counter() - t0:.1f}s]", file=sys.stderr)
    if not args.fast:
        return EXIT_OK
    lines, ok = _ordering_lines(_fast_reports(runner))
    print("\n".join(lines), file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def _cache_order(key):
    model, cls, n = key
    return (scenarios.MODEL_ORDER.index(model) if model in scenarios.MODEL_ORDER else 99, cls, n)


def cmd_hierarchy(args) -> int:
    m, eps = (FAST["m"], FAST["epsilon"]) if args.fast else (args.m, args.epsilon)
    runner = scenarios.Runner(_params(args, eps), m, args.goal, _progress(args.verbose))
    reports = _fast_reports(runner) if args.fast else scenarios.run_orderings(runner)
    lines, ok = _ordering_lines(reports)
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_FAIL


# --------------------------------------------------------------------------- parser

def _common(p: argparse.ArgumentParser, experiment: bool = True) -> None:
    p.add_argument("--seed", help="master seed (decimal, 64-bit); default $SA_LSS_SEED or 1")
    p.add_argument("--goal", default="win", help="goal set name (default: win)")
    p.add_argument("--delta", type=float, default=0.05, help="confidence parameter (default 0.05)")
    p.add_argument("--max-steps", type=int, default=100, help="step bound per run (default 100)")
    p.add_argument("--strict", action="store_true", help="fail on any truncated run")
    if experiment:
        p.add_argument("--epsilon", type=float, default=0.01, help="precision (default 0.01)")
        p.add_argument("-m", type=int, default=10000, help="sampled schedulers (default 10000)")
        p.add_argument("--jobs", type=int, default=1, help="worker threads")
        p.add_argument("--out", help="write output to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="salss",
        description="Simulate stochastic automata and estimate extreme reachability probabilities "
                    "by lightweight scheduler sampling.",
        epilog=f"Scheduler classes: {CLASS_HELP}",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("models", help="builtin models")
    p.add_argument("action", choices=["list"])
    p.set_defaults(func=cmd_models)

    p = sub.add_parser("strategies", help="named reference strategies")
    p.set_defaults(func=cmd_strategies)

    p = sub.add_parser("validate", help="check a builtin model or JSON model file")
    p.add_argument("src")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", help="estimate one fixed strategy or one sampled scheduler")
    p.add_argument("--model", required=True)
    p.add_argument("--strategy", help="named strategy (see `salss strategies`)")
    p.add_argument("--scheduler-id", type=int, help="id of a sampled scheduler")
    p.add_argument("--class", dest="cls", help="scheduler class for --scheduler-id")
    p.add_argument("--n", type=int, default=1, help="discretisation factor for --scheduler-id")
    p.add_argument("--runs", type=int, default=okamoto_runs(0.01, 0.05))
    _common(p, experiment=False)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("lss", help="two-stage scheduler-sampling experiment")
    p.add_argument("--model", required=True)
    p.add_argument("--class", dest="cls", required=True, help=CLASS_HELP)
    p.add_argument("--n", type=int, default=1, help="discretisation factor")
    p.add_argument("--format", choices=["csv", "markdown", "json"], default="csv")
    _common(p)
    p.set_defaults(func=cmd_lss)

    p = sub.add_parser("table", help="reproduce the results table")
    p.add_argument("which", choices=["fig8"])
    p.add_argument("--fast", action="store_true", help=f"m={FAST['m']}, epsilon={FAST['epsilon']}; checks orderings")
    p.add_argument("--format", choices=["text", "csv", "markdown", "json"], default="text")
    p.add_argument("-v", "--verbose", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("hierarchy", help="check the proven class orderings")
    p.add_argument("--fast", action="store_true")
    p.add_argument("-v", "--verbose", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_hierarchy)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits with 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"salss: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidModel, ParseError) as exc:
        print(f"salss: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except NotFound as exc:
        print(f"salss: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SaError, ValueError) as exc:
        print(f"salss: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
