import random
import struct

import pytest
from hypothesis import given, strategies as st

import checks
from helpers import random_context
from salss.builtins import builtin
from salss.model import Constant, Edge, build
from salss.observe import (ALL_CLASSES, FNV_OFFSET, Future, Memory, ObservationTrace, SchedulerClass,
                           Timing, discretise, encode_label, expiration_order, extend_trace, key_fields,
                           project)
from salss.rng import SplitMix64
from salss.semantics import Delay, Jump, RunContext, State, enabled_edges, new_context, step


def test_eighteen_distinct_classes():
    assert len(ALL_CLASSES) == 18
    assert sorted(c.tag for c in ALL_CLASSES) == list(range(18))
    assert len({c.spec for c in ALL_CLASSES}) == 18


@pytest.mark.parametrize("cls", ALL_CLASSES, ids=lambda c: c.spec)
def test_spec_round_trip(cls):
    assert SchedulerClass.parse(cls.spec) == cls
    assert str(cls) == cls.spec


def test_parse_examples():
    assert SchedulerClass.parse("ml:") == SchedulerClass(Memory.MEMORYLESS, Timing.NEITHER, Future.NONE)
    assert SchedulerClass.parse("hist:o, v") == SchedulerClass.parse("hist:v,o")
    assert SchedulerClass.parse("ml:t,o").pretty == "ml ℓ,t,o"
    assert not SchedulerClass.parse("hist:v").prophetic
    for bad in ("", "hist", "ml:x", "ml:v,t", "ml:e,o", "memo:v"):
        with pytest.raises(ValueError):
            SchedulerClass.parse(bad)


def test_discretise_examples():
    assert discretise(0.37, 2) == 0
    assert discretise(0.5, 2) == 1
    assert discretise(1.3, 4) == 5
    assert discretise(1e300, 4) == 2**64 - 1
    with pytest.raises(ValueError):
        discretise(0.5, 0)


@given(st.floats(0, 1e6), st.integers(1, 64))
def test_refinement_monotone(x, n):
    assert discretise(x, 2 * n) // 2 == discretise(x, n)


def test_expiration_order_examples():
    assert expiration_order({"x": 0, "y": 0}, {"x": 0.3, "y": 0.8}) == {"x": 0, "y": 1}
    assert expiration_order({"x": 0.25, "y": 0.5}, {"x": 0.75, "y": 1.0}) == {"x": 0, "y": 0}
    # M1 after entering l1: y was never restarted, so it is already expired
    assert expiration_order({"x": 0.0, "y": 0.0}, {"x": 0.42, "y": 0.0}) == {"y": 0, "x": 1}
    assert expiration_order({"a": 1, "b": 0, "c": 0}, {"a": 1, "b": 3, "c": 3}) == {"a": 0, "b": 1, "c": 1}


@given(st.lists(st.tuples(st.floats(0, 10), st.floats(0, 10)), min_size=1, max_size=6))
def test_expiration_order_shift_invariant(pairs):
    names = [f"c{i}" for i in range(len(pairs))]
    v = {c: p[0] for c, p in zip(names, pairs)}
    e = {c: p[1] for c, p in zip(names, pairs)}
    ranks = expiration_order(v, e)
    assert sorted(set(ranks.values())) == list(range(len(set(ranks.values()))))
    # shifting v and e of a clock by the same amount leaves residuals, hence ranks, unchanged;
    # use exact binary fractions so no rounding enters
    v2 = {c: v[c] + 0.5 for c in names}
    e2 = {c: e[c] + 0.5 for c in names}
    if all(e2[c] - v2[c] == e[c] - v[c] for c in names):
        assert expiration_order(v2, e2) == ranks


def test_key_layout():
    m = builtin("M2")
    s = State("l2", {"x": 1.3, "y": 0.2, "z": 0.7}, {"x": 2.1, "y": 0.9, "z": 0.75})
    ctx = RunContext(m, s, elapsed=3.3, trace=ObservationTrace(12345, 4))
    cls = SchedulerClass.parse("hist:v,e")
    assert key_fields(cls, 2, ctx) == [cls.tag, 2, 2, 12345, 2, 0, 1, 4, 1, 1]
    cls = SchedulerClass.parse("ml:t,o")
    # residuals x 0.8, y 0.7, z 0.05
    assert key_fields(cls, 4, ctx) == [cls.tag, 4, 2, 13, 2, 1, 0]
    assert project(cls, 4, ctx) == struct.pack("<7Q", cls.tag, 4, 2, 13, 2, 1, 0)


def test_location_only_class_sees_only_location():
    m = builtin("M4")
    cls = SchedulerClass.parse("ml:")
    rng = random.Random(0)
    keys = {project(cls, 1, random_context(m, rng, location="l2")) for _ in range(50)}
    assert keys == {struct.pack("<3Q", cls.tag, 1, m.location_index["l2"])}


def _enter_l2(model, action, cls):
    """Context on entering M6's l2 via the given l1 edge (x or y expiring first)."""
    e = {"x": 0.3, "y": 0.6} if action == "e0" else {"x": 0.6, "y": 0.3}
    ctx = RunContext(model, State("l0", {"x": 0.0, "y": 0.0}, {"x": 0.0, "y": 0.0}), cls=cls, n=1)
    rng = _Fixed([e["x"], e["y"]])
    _, ctx = step(model, ctx, model.outgoing("l0")[0], rng)
    _, ctx = step(model, ctx, None, rng)
    (edge,) = enabled_edges(model, ctx.state)
    assert edge.action == action
    _, ctx = step(model, ctx, edge, rng)
    assert ctx.state.location == "l2"
    return ctx


class _Fixed:
    def __init__(self, values):
        self.values = list(values)

    def random(self):
        return self.values.pop(0)


def test_m6_memoryless_values_cannot_tell_entry_edge():
    m = builtin("M6")
    cls = SchedulerClass.parse("ml:v")
    a, b = _enter_l2(m, "e0", cls), _enter_l2(m, "e1", cls)
    assert a.state.values == b.state.values
    assert project(cls, 1, a) == project(cls, 1, b)


def test_m6_history_tells_entry_edge():
    m = builtin("M6")
    cls = SchedulerClass.parse("hist:v")
    a, b = _enter_l2(m, "e0", cls), _enter_l2(m, "e1", cls)
    assert project(cls, 1, a) != project(cls, 1, b)
    assert a.trace.digest != b.trace.digest


def test_trace_fold():
    cls = SchedulerClass.parse("hist:v")
    t0 = ObservationTrace()
    assert t0.digest == FNV_OFFSET
    r1 = (b"key-one", Jump("e0", 0))
    r2 = (b"key-two", Delay(0.5))
    t1 = extend_trace(t0, cls, 2, *r1)
    assert t1.digest != FNV_OFFSET and t1.steps == 1
    assert extend_trace(t0, cls, 2, *r1) == t1
    ab = extend_trace(extend_trace(t0, cls, 2, *r1), cls, 2, *r2)
    ba = extend_trace(extend_trace(t0, cls, 2, *r2), cls, 2, *r1)
    assert ab != ba
    ml = extend_trace(t0, SchedulerClass.parse("ml:v"), 2, *r1)
    assert ml == ObservationTrace(FNV_OFFSET, 1)


def test_label_encoding():
    assert encode_label(Jump("e1", 1), 4) == struct.pack("<2Q", 0, 1)
    assert encode_label(Delay(0.6), 4) == struct.pack("<2Q", 1, 2)


def test_history_delays_sum_to_elapsed_on_grid_aligned_model():
    """With constant, grid-aligned delays the recorded delay labels are lossless."""
    m = build("grid", ["a", "b", "c", "done"], [("p", Constant(0.25)), ("q", Constant(0.5))],
              [("a", Edge.to("b", "go", restarts={"p", "q"})),
               ("b", Edge.to("c", "tick", guard={"p"}, restarts={"p"})),
               ("c", Edge.to("done", "tock", guard={"q"}))],
              "a", {"win": ["done"]})
    cls = SchedulerClass.parse("hist:t")
    ctx = new_context(m, cls, 4)
    rng = SplitMix64(0)
    delays = []
    while m.outgoing(ctx.state.location):
        enabled = enabled_edges(m, ctx.state)
        label, ctx = step(m, ctx, enabled[0] if enabled else None, rng)
        if isinstance(label, Delay):
            delays.append(discretise(label.duration, 4))
    assert sum(delays) / 4 == ctx.elapsed == 0.5


def test_masking_small():
    checks.masking(300)
