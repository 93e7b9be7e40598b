import random

import pytest
from scipy import stats

import checks
from helpers import random_state
from salss.builtins import NAMES, builtin
from salss.errors import ContractViolation, ModelError, Timelock
from salss.model import Edge, Uniform, build
from salss.rng import SplitMix64
from salss.semantics import (Delay, Jump, RunContext, State, advance, enabled_edges, initial_state,
                             is_enabled, jump, min_delay, new_context, step)


def st(model, loc, v, e):
    return State(loc, dict(zip(model.clocks, v)), dict(zip(model.clocks, e)))


def test_initial_state_all_expired():
    m = builtin("M0")
    s = initial_state(m)
    assert s == State("l0", {"x": 0.0, "y": 0.0}, {"x": 0.0, "y": 0.0})
    assert all(s.values[c] >= s.expirations[c] for c in m.clocks)
    assert len(enabled_edges(m, s)) == 1
    m2 = builtin("M2")
    assert [e.guard for e in enabled_edges(m2, initial_state(m2))] == [frozenset()]


def test_is_enabled():
    assert is_enabled(frozenset(), {"x": 0.1}, {"x": 0.9})
    assert is_enabled({"x"}, {"x": 0.5}, {"x": 0.5})
    assert not is_enabled({"x"}, {"x": 0.3}, {"x": 0.5})
    with pytest.raises(ModelError):
        is_enabled({"q"}, {"x": 0.3}, {"x": 0.5})


def test_enabled_edges_m0():
    m = builtin("M0")
    assert [e.action for e in enabled_edges(m, st(m, "l1", (0, 0), (0.3, 0.6)))] == ["e0", "e1"]
    assert enabled_edges(m, st(m, "l2", (0, 0), (0.4, 0.7))) == []
    assert [e.guard for e in enabled_edges(m, st(m, "l2", (0.4, 0.4), (0.4, 0.7)))] == [frozenset({"x"})]


def test_min_delay_examples():
    m0 = builtin("M0")
    assert min_delay(m0, st(m0, "l2", (0, 0), (0.4, 0.7))) == pytest.approx(0.4)
    assert min_delay(m0, st(m0, "✓", (0, 0), (0.4, 0.7))) is None
    m2 = builtin("M2")
    assert min_delay(m2, st(m2, "l1", (0, 0, 0), (6.0, 0.5, 2.5))) == pytest.approx(2.5)
    with pytest.raises(ContractViolation):
        min_delay(m0, st(m0, "l1", (0, 0), (0.4, 0.7)))


def test_min_delay_uses_slowest_guard_clock():
    m = build("g", ["a", "b"], [("x", Uniform(0, 1)), ("y", Uniform(0, 1))],
              [("a", Edge.to("b", "go", guard={"x", "y"}))], "a", {"win": ["b"]})
    assert min_delay(m, st(m, "a", (0.1, 0.0), (0.3, 0.9))) == pytest.approx(0.9)


def test_jump_from_l0_restarts_both():
    m = builtin("M0")
    rng = SplitMix64(1)
    label, ctx = step(m, new_context(m), m.outgoing("l0")[0], rng)
    assert label == Jump("e0", 0)
    assert ctx.state.location == "l1" and ctx.state.values == {"x": 0.0, "y": 0.0}
    assert all(0 < ctx.state.expirations[c] < 1 for c in m.clocks)
    assert ctx.steps == 1 and ctx.elapsed == 0.0


def test_delay_step():
    m = builtin("M0")
    s = st(m, "l2", (0, 0), (0.4, 0.7))
    label, ctx = step(m, RunContext(m, s), None, SplitMix64(0))
    assert label == Delay(pytest.approx(0.4))
    assert ctx.state.values == {"x": pytest.approx(0.4), "y": pytest.approx(0.4)}
    assert ctx.state.expirations == s.expirations
    assert ctx.elapsed == pytest.approx(0.4)


def test_m1_jump_keeps_x():
    m = builtin("M1")
    s = st(m, "l1", (0.0, 0.0), (0.37, 0.0))
    after = jump(m, s, m.edge("l1", "e0"), SplitMix64(3))
    assert after.location == "l2"
    assert after.expirations["x"] == 0.37 and after.expirations["y"] != 0.0
    assert after.values == {"x": 0.0, "y": 0.0}


def test_step_contracts():
    m = builtin("M0")
    ctx = new_context(m)
    with pytest.raises(ContractViolation):
        step(m, ctx, None, SplitMix64(0))
    with pytest.raises(ContractViolation):
        step(m, ctx, m.edge("l1", "e0"), SplitMix64(0))
    dead = RunContext(m, st(m, "✗", (0, 0), (1, 1)))
    with pytest.raises(Timelock):
        step(m, dead, None, SplitMix64(0))
    waiting = RunContext(m, st(m, "l2", (0, 0), (0.4, 0.7)))
    with pytest.raises(ContractViolation):
        step(m, waiting, m.edge("l2", "e0"), SplitMix64(0))


def test_advance_snaps_due_clocks():
    m = build("s", ["a", "b"], [("x", Uniform(0, 1)), ("y", Uniform(0, 1))],
              [("a", Edge.to("b", "go", guard={"x"}))], "a", {"win": ["b"]})
    v, e = {"x": 0.1, "y": 0.7}, {"x": 0.30000000000000004, "y": 0.2}
    d = e["x"] - v["x"]
    out = advance(m, State("a", v, e), d)
    assert out["x"] >= e["x"]
    assert out["y"] == 0.7 + d  # already expired: plain addition


@pytest.mark.parametrize("name", NAMES)
def test_runs_bookkeeping(name):
    """Elapsed time equals the sum of the delay labels; every run ends in an absorbing location."""
    m = builtin(name)
    rng = SplitMix64(99)
    pick = random.Random(4)
    for _ in range(200):
        ctx = new_context(m)
        total = 0.0
        while m.outgoing(ctx.state.location):
            enabled = enabled_edges(m, ctx.state)
            label, ctx = step(m, ctx, pick.choice(enabled) if enabled else None, rng)
            if isinstance(label, Delay):
                assert label.duration > 0
                total += label.duration
            assert ctx.steps <= 12
        assert ctx.elapsed == total
        assert ctx.state.location in ("✓", "✗")


def test_random_states_are_total():
    m = builtin("M3")
    s = random_state(m, random.Random(0))
    assert set(s.values) == set(s.expirations) == set(m.clocks)


def test_min_delay_against_grid_small():
    assert checks.min_delay_grid(40, grid=2000)["states"] == 40 * len(NAMES)


def test_expired_stays_expired_small():
    checks.expired_stays_expired(5000)


def test_first_jump_distribution_small():
    # at 2·10^4 samples a KS distance of 0.015 has p < 1e-3 under the null
    m = builtin("M0")
    stream = SplitMix64(8)
    xs = [jump(m, initial_state(m), m.outgoing("l0")[0], stream).expirations["x"] for _ in range(20000)]
    assert stats.kstest(xs, "uniform").statistic < 0.015
