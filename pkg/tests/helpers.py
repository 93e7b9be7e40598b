"""Shared test utilities: random states, class-aware perturbations, toy models."""
from __future__ import annotations

import math
import random
from dataclasses import replace

from salss.model import Constant, Edge, Exponential, Uniform, build
from salss.observe import Future, ObservationTrace, SchedulerClass, Timing
from salss.semantics import RunContext, State

MASK64 = (1 << 64) - 1


def random_state(model, rng: random.Random, location=None) -> State:
    loc = location or rng.choice(model.locations)
    v = {c: rng.uniform(0, 3) for c in model.clocks}
    e = {c: rng.uniform(0, 3) for c in model.clocks}
    return State(loc, v, e)


def random_context(model, rng: random.Random, cls=None, n=1, location=None) -> RunContext:
    st = random_state(model, rng, location)
    return RunContext(model, st, elapsed=rng.uniform(0, 5), steps=rng.randrange(10),
                      trace=ObservationTrace(rng.getrandbits(64), rng.randrange(10)),
                      last_action=rng.choice((None, *model.actions)), cls=cls, n=n)


def same_cell(x: float, n: int, rng: random.Random) -> float:
    """Another value whose grid cell [i/n, (i+1)/n) equals that of x."""
    i = math.floor(x * n)
    while True:
        y = (i + rng.random()) / n
        if math.floor(y * n) == i:
            return y


def perturb(ctx: RunContext, cls: SchedulerClass, rng: random.Random, n: int | None = None) -> RunContext:
    """Change everything ``cls`` cannot observe.

    With ``n`` given, visible real-valued components also move within their
    grid cell, so the perturbed context must project to the same key.
    """
    model = ctx.model
    v = dict(ctx.state.values)
    e = dict(ctx.state.expirations)
    elapsed = ctx.elapsed
    digest = ctx.trace.digest
    last = ctx.last_action
    if cls.future is Future.ORDER:
        # any strictly increasing map of the residuals preserves their ranks
        a, b = rng.uniform(0.5, 2.0), rng.uniform(0.0, 1.0)
        resid = {c: e[c] - v[c] for c in model.clocks}
    if cls.timing is not Timing.VALUES:
        v = {c: rng.uniform(0, 3) for c in model.clocks}
    elif n is not None:
        v = {c: same_cell(v[c], n, rng) for c in model.clocks}
    if cls.future is Future.NONE:
        e = {c: rng.uniform(0, 3) for c in model.clocks}
    elif cls.future is Future.EXPIRATIONS:
        if n is not None:
            e = {c: same_cell(e[c], n, rng) for c in model.clocks}
    else:
        e = {c: v[c] + a * resid[c] + b for c in model.clocks}
    if cls.timing is not Timing.GLOBAL_TIME:
        elapsed = rng.uniform(0, 5)
    elif n is not None:
        elapsed = same_cell(elapsed, n, rng)
    if not cls.history:
        digest = rng.getrandbits(64)
        last = rng.choice((None, *model.actions))
    return replace(ctx, state=State(ctx.state.location, v, e), elapsed=elapsed,
                   trace=ObservationTrace(digest, ctx.trace.steps), last_action=last,
                   steps=rng.randrange(10))


def toy_model():
    """A small model touching every kernel branch: all three distributions,
    probabilistic targets, ties in expiration order, a dead end and a loop."""
    return build(
        "toy",
        ["s", "a", "b", "dead", "loop", "goal"],
        [("c", Constant(0.5)), ("d", Constant(0.5)), ("u", Uniform(0.25, 1.5)), ("x", Exponential(2.0))],
        [
            ("s", Edge("go", frozenset(), frozenset({"c", "d", "u", "x"}),
                       (("a", 0.5), ("b", 0.3), ("dead", 0.2)))),
            ("a", Edge.to("goal", "fast", guard={"c"})),
            ("a", Edge.to("loop", "slow", guard={"u"}, restarts={"c"})),
            ("a", Edge.to("b", "tie", guard={"d"}, restarts={"u"})),
            ("b", Edge.to("goal", "p", guard={"x"}, restarts={"x"})),
            ("b", Edge.to("a", "q", guard={"u", "c"}, restarts={"c", "d", "u"})),
            ("loop", Edge.to("loop", "spin", restarts={"x"})),
            ("loop", Edge.to("a", "back", guard={"x"}, restarts={"c", "d"})),
        ],
        "s",
        {"win": ["goal"], "lose": ["dead"]},
    )
