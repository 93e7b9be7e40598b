#!/usr/bin/env python3
"""Throughput of the compiled run engine against the pure-Python fallback.

    python benchmarks/bench_kernel.py [--runs 2000] [--model M3] [--class hist:v,e]

Both engines simulate the same schedulers on the same run indices, so the
counts they report must be identical; the script checks that as it goes.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from salss import _pykernel, backend
from salss.builtins import builtin
from salss.lss import sample_ids
from salss.observe import SchedulerClass


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", default="M3")
    ap.add_argument("--class", dest="cls", default="hist:v,e")
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--ids", type=int, default=20)
    ap.add_argument("--runs", type=int, default=200, help="runs per scheduler")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    model = builtin(args.model)
    goal = model.goal("win")
    cls = SchedulerClass.parse(args.cls)
    ids = sample_ids(args.ids, args.seed)
    total = args.ids * args.runs
    print(f"{args.model} {cls.spec} n={args.n}: {args.ids} schedulers x {args.runs} runs = {total} runs")

    py, t_py = timed(lambda: _pykernel.lss_counts(model, goal, cls, args.n, ids, args.seed, 0,
                                                   args.runs, 100))
    print(f"  python    {t_py:8.3f} s  {total / t_py:12,.0f} runs/s")
    if "compiled" not in backend.available():
        print("  compiled  (extension not built)")
        return
    if backend.NAME != "compiled":
        print("  compiled  (disabled by SALSS_BACKEND)")
        return
    backend.lss_counts(model, goal, cls, args.n, ids[:1], args.seed, 0, 1, 100)  # warm caches
    cc, t_c = timed(lambda: backend.lss_counts(model, goal, cls, args.n, ids, args.seed, 0,
                                               args.runs, 100))
    print(f"  compiled  {t_c:8.3f} s  {total / t_c:12,.0f} runs/s   speed-up x{t_py / t_c:,.0f}")
    same = np.array_equal(np.asarray(py[0]), cc[0]) and np.array_equal(np.asarray(py[1]), cc[1])
    print(f"  identical counts: {same}")
    if not same:
        raise SystemExit(1)


if __name__ == "__main__":
    main()
