"""Pure-Python run engine.

Selected when the compiled extension is unavailable (or SALSS_BACKEND=python).
It drives the reference semantics and observation code directly and must
agree with ``_kernel.pyx`` bit for bit.
"""
from __future__ import annotations

from typing import Callable, NamedTuple

from . import lss, semantics
from .observe import SchedulerClass, project
from .rng import FNV_OFFSET
from .rng import run_stream

NOT_REACHED, REACHED, TRUNCATED = 0, 1, 2


class RunDetail(NamedTuple):
    outcome: int
    location: int
    elapsed: float
    steps: int
    digest: int


def simulate(model, goal: frozenset, choose: Callable, rng, max_steps: int,
             cls: SchedulerClass | None = None, n: int = 1) -> RunDetail:
    ctx = semantics.new_context(model, cls, n)
    while True:
        loc = ctx.state.location
        if loc in goal:
            outcome = REACHED
            break
        if ctx.steps >= max_steps:
            outcome = TRUNCATED
            break
        enabled = semantics.enabled_edges(model, ctx.state)
        if enabled:
            _, ctx = semantics.step(model, ctx, choose(ctx, enabled), rng)
        elif semantics.min_delay(model, ctx.state) is None:
            outcome = NOT_REACHED  # absorbing
            break
        else:
            _, ctx = semantics.step(model, ctx, None, rng)
    digest = ctx.trace.digest if cls is not None and cls.history else FNV_OFFSET
    return RunDetail(outcome, model.location_index[ctx.state.location], ctx.elapsed, ctx.steps, digest)


def lss_chooser(sid: int, cls: SchedulerClass, n: int):
    def choose(ctx, enabled):
        if len(enabled) == 1:
            return enabled[0]
        return enabled[lss.decide(sid, project(cls, n, ctx), len(enabled))]
    return choose


def lss_detail(model, goal, cls, n, sid, master_seed, run_index, max_steps) -> RunDetail:
    rng = run_stream(master_seed, sid, run_index)
    return simulate(model, goal, lss_chooser(sid, cls, n), rng, max_steps, cls, n)


def rule_detail(model, goal, strategy, seed, run_index, max_steps) -> RunDetail:
    rng = run_stream(seed, 0, run_index)
    return simulate(model, goal, strategy.choose, rng, max_steps)


def lss_counts(model, goal, cls, n, ids, master_seed, run_start, runs, max_steps):
    reached, truncated = [], []
    for sid in ids:
        r = t = 0
        for i in range(run_start, run_start + runs):
            out = lss_detail(model, goal, cls, n, int(sid), master_seed, i, max_steps).outcome
            r += out == REACHED
            t += out == TRUNCATED
        reached.append(r)
        truncated.append(t)
    return reached, truncated


def rule_counts(model, goal, strategy, seed, run_start, runs, max_steps):
    r = t = 0
    for i in range(run_start, run_start + runs):
        out = rule_detail(model, goal, strategy, seed, i, max_steps).outcome
        r += out == REACHED
        t += out == TRUNCATED
    return r, t
