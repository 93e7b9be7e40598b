"""Residual-lifetime semantics of closed stochastic automata.

States are triples (location, clock values v, expiration times e). A jump
takes an enabled edge, zeroes and resamples the restarted clocks; a delay
advances all clocks by the least amount that enables some edge.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, NamedTuple, Optional, Union

from .errors import ContractViolation, ModelError, Timelock
from .model import Edge, SaModel
from .observe import ObservationTrace, SchedulerClass, extend_trace, project


class Jump(NamedTuple):
    action: str
    index: int  # position of the action in the model alphabet


class Delay(NamedTuple):
    duration: float


StepLabel = Union[Jump, Delay]


@dataclass(frozen=True)
class State:
    location: str
    values: Mapping[str, float]
    expirations: Mapping[str, float]


@dataclass(frozen=True)
class RunContext:
    model: SaModel
    state: State
    elapsed: float = 0.0
    steps: int = 0
    trace: ObservationTrace = field(default_factory=ObservationTrace)
    last_action: Optional[str] = None
    # observation recorded into the trace on every step; None records nothing
    cls: Optional[SchedulerClass] = None
    n: int = 1


def initial_state(model: SaModel) -> State:
    zero = {c: 0.0 for c in model.clocks}
    return State(model.initial, zero, dict(zero))


def new_context(model: SaModel, cls: SchedulerClass | None = None, n: int = 1) -> RunContext:
    return RunContext(model, initial_state(model), cls=cls, n=n)


def is_enabled(guard, v: Mapping[str, float], e: Mapping[str, float]) -> bool:
    try:
        return all(v[x] >= e[x] for x in guard)
    except KeyError as exc:
        raise ModelError(f"unknown clock {exc.args[0]!r}") from None


def enabled_edges(model: SaModel, state: State) -> list[Edge]:
    v, e = state.values, state.expirations
    return [edge for edge in model.outgoing(state.location) if is_enabled(edge.guard, v, e)]


def min_delay(model: SaModel, state: State) -> float | None:
    """Least positive delay after which some outgoing edge is enabled, or None."""
    v, e = state.values, state.expirations
    best = None
    for edge in model.outgoing(state.location):
        if not edge.guard:
            raise ContractViolation(f"edge {edge.action} at {state.location} is enabled; no delay possible")
        wait = max(e[x] - v[x] for x in edge.guard)
        if wait <= 0:
            raise ContractViolation(f"edge {edge.action} at {state.location} is enabled; no delay possible")
        if best is None or wait < best:
            best = wait
    return best


def advance(model: SaModel, state: State, d: float) -> dict[str, float]:
    """Clock values after letting ``d`` time units pass."""
    v, e = state.values, state.expirations
    out = {}
    for c in model.clocks:
        nv = v[c] + d
        # v + (e - v) can round below e; clocks due within d must read as expired
        if v[c] < e[c] and e[c] - v[c] <= d and nv < e[c]:
            nv = e[c]
        out[c] = nv
    return out


def sample_target(edge: Edge, rng) -> str:
    if len(edge.targets) == 1:
        return edge.targets[0][0]
    u = rng.random()
    acc = 0.0
    for loc, w in edge.targets:
        acc += w
        if u < acc:
            return loc
    return edge.targets[-1][0]


def jump(model: SaModel, state: State, edge: Edge, rng) -> State:
    target = sample_target(edge, rng)
    values = {c: 0.0 if c in edge.restarts else state.values[c] for c in model.clocks}
    expirations = dict(state.expirations)
    for c in model.clocks:
        if c in edge.restarts:
            expirations[c] = model.delay_measures[c].sample(rng.random())
    return State(target, values, expirations)


def step(model: SaModel, ctx: RunContext, chosen: Edge | None, rng) -> tuple[StepLabel, RunContext]:
    state = ctx.state
    enabled = enabled_edges(model, state)
    if enabled:
        if chosen is None or chosen not in enabled:
            raise ContractViolation(f"chosen edge {chosen!r} is not enabled at {state.location}")
        label: StepLabel = Jump(chosen.action, model.action_index[chosen.action])
        new_state = jump(model, state, chosen, rng)
        elapsed = ctx.elapsed
        last = chosen.action
    else:
        if chosen is not None:
            raise ContractViolation(f"no edge is enabled at {state.location}; cannot take {chosen.action}")
        d = min_delay(model, state)
        if d is None:
            raise Timelock(f"location {state.location} can neither jump nor delay")
        label = Delay(d)
        new_state = State(state.location, advance(model, state, d), state.expirations)
        elapsed = ctx.elapsed + d
        last = ctx.last_action
    if ctx.cls is not None:
        trace = extend_trace(ctx.trace, ctx.cls, ctx.n, project(ctx.cls, ctx.n, ctx), label)
    else:
        trace = ObservationTrace(ctx.trace.digest, ctx.trace.steps + 1)
    return label, replace(ctx, state=new_state, elapsed=elapsed, steps=ctx.steps + 1,
                          trace=trace, last_action=last)
