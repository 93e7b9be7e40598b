"""Property checks shared by the unit tests (small sizes) and the acceptance
suite (full sizes). Each returns a short summary dict; failures raise AssertionError."""
from __future__ import annotations

import random

import numpy as np
from scipy import stats

from helpers import perturb, random_context
from salss.builtins import NAMES, builtin
from salss.lss import decide
from salss.observe import ALL_CLASSES, project
from salss.rng import SplitMix64
from salss.semantics import State, enabled_edges, initial_state, is_enabled, jump, min_delay


def delay_state(model, rng):
    """Random state at a location with outgoing edges, none of them enabled."""
    candidates = [l for l in model.locations if model.outgoing(l) and all(e.guard for e in model.outgoing(l))]
    while True:
        loc = rng.choice(candidates)
        v = {c: rng.uniform(0, 2) for c in model.clocks}
        e = {c: v[c] + rng.uniform(-1, 2) for c in model.clocks}
        e = {c: max(x, 0.0) for c, x in e.items()}
        st = State(loc, v, e)
        if not enabled_edges(model, st):
            return st


def min_delay_grid(states_per_model: int, grid: int = 10_000, seed: int = 3) -> dict:
    """The closed-form minimal delay lies within one grid cell of the first enabling grid point."""
    rng = random.Random(seed)
    checked = 0
    for name in NAMES:
        m = builtin(name)
        for _ in range(states_per_model):
            st = delay_state(m, rng)
            d = min_delay(m, st)
            horizon = max(st.expirations[c] - st.values[c] for c in m.clocks) + 1.0
            ts = np.linspace(horizon / grid, horizon, grid)
            first = None
            for edge in m.outgoing(st.location):
                ok = np.ones(grid, dtype=bool)
                for c in edge.guard:
                    ok &= st.values[c] + ts >= st.expirations[c]
                idx = np.flatnonzero(ok)
                if idx.size:
                    first = idx[0] if first is None else min(first, idx[0])
            assert first is not None, (name, st)
            step = horizon / grid
            assert ts[first] - step - 1e-12 <= d <= ts[first] + 1e-12, (name, st, d, ts[first])
            for frac in (0.5, 0.25, 0.125):
                vv = {c: st.values[c] + d * frac for c in m.clocks}
                assert not any(is_enabled(e.guard, vv, st.expirations) for e in m.outgoing(st.location))
            checked += 1
    return {"states": checked}


def expired_stays_expired(jumps: int, seed: int = 5) -> dict:
    rng = random.Random(seed)
    stream = SplitMix64(seed)
    models = [builtin(n) for n in NAMES]
    done = 0
    while done < jumps:
        m = rng.choice(models)
        loc = rng.choice([l for l in m.locations if m.outgoing(l)])
        v = {c: rng.uniform(0, 2) for c in m.clocks}
        e = {c: rng.uniform(0, 2) for c in m.clocks}
        st = State(loc, v, e)
        enabled = enabled_edges(m, st)
        if not enabled:
            continue
        edge = rng.choice(enabled)
        after = jump(m, st, edge, stream)
        for c in m.clocks:
            if v[c] >= e[c] and c not in edge.restarts:
                assert after.values[c] >= after.expirations[c], (m.name, st, edge)
            if c not in edge.restarts:
                assert after.values[c] == v[c] and after.expirations[c] == e[c]
            else:
                assert after.values[c] == 0.0
        done += 1
    return {"jumps": done}


def ks_first_jump(samples: int, seed: int = 11) -> dict:
    m = builtin("M0")
    stream = SplitMix64(seed)
    st = initial_state(m)
    edge = m.outgoing("l0")[0]
    xs = np.empty(samples)
    ys = np.empty(samples)
    for i in range(samples):
        after = jump(m, st, edge, stream)
        xs[i] = after.expirations["x"]
        ys[i] = after.expirations["y"]
    dx = stats.kstest(xs, "uniform").statistic
    dy = stats.kstest(ys, "uniform").statistic
    assert dx < 0.01 and dy < 0.01, (dx, dy)
    return {"D_x": dx, "D_y": dy}


def masking(perturbations_per_class: int, seed: int = 13, factors=(1, 2, 4)) -> dict:
    """Perturbing what a class cannot see never changes its key, nor any decision."""
    rng = random.Random(seed)
    models = [builtin(n) for n in NAMES]
    for cls in ALL_CLASSES:
        for _ in range(perturbations_per_class):
            m = rng.choice(models)
            n = rng.choice(factors)
            ctx = random_context(m, rng, cls, n)
            other = perturb(ctx, cls, rng, n)
            key = project(cls, n, ctx)
            assert key == project(cls, n, other), (cls.spec, n, ctx, other)
            sid = rng.getrandbits(32)
            assert decide(sid, key, 2) == decide(sid, project(cls, n, other), 2)
    return {"classes": len(ALL_CLASSES), "per_class": perturbations_per_class}


def decide_uniformity(ids: int, seed: int = 17) -> float:
    rng = random.Random(seed)
    key = b"\x01" * 40
    zeros = sum(decide(rng.getrandbits(32), key, 2) == 0 for _ in range(ids))
    frac = zeros / ids
    assert abs(frac - 0.5) <= 0.01, frac
    return frac


__all__ = ["min_delay_grid", "expired_stays_expired", "ks_first_jump", "masking", "decide_uniformity",
           "delay_state"]
