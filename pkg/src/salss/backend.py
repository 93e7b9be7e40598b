"""Run-engine selection and batch entry points.

The compiled extension ``salss._kernel`` is used when it imports; otherwise
the pure-Python engine in ``salss._pykernel`` takes over. Set
``SALSS_BACKEND=python`` (or ``compiled``) to force a choice. Both engines
give identical results, so the choice only affects speed.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _pykernel
from ._pykernel import NOT_REACHED, REACHED, TRUNCATED, RunDetail
from .errors import ContractViolation, ModelError
from .model import Constant, Exponential, SaModel, Uniform
from .observe import Future, SchedulerClass, Timing
from .rules import NamedStrategy, compile_program

__all__ = ["NAME", "NOT_REACHED", "REACHED", "TRUNCATED", "RunDetail", "available",
           "lss_counts", "rule_counts", "lss_detail", "rule_detail", "compile_model"]

MAX_BRANCHING = 256  # fixed-size enabled-edge buffer in the compiled kernel
MAX_CLOCKS = 64  # guards and restart sets are 64-bit masks in the compiled kernel


def _load():
    choice = os.environ.get("SALSS_BACKEND", "").strip().lower()
    if choice not in ("", "python", "compiled"):
        raise ImportError(f"SALSS_BACKEND must be 'python' or 'compiled', got {choice!r}")
    if choice == "python":
        return None
    try:
        from . import _kernel
    except ImportError:
        if choice == "compiled":
            raise
        return None
    return _kernel


_kernel = _load()
NAME = "compiled" if _kernel is not None else "python"


def available() -> list[str]:
    """Engines usable in this process."""
    try:
        from . import _kernel as k  # noqa: F401
    except ImportError:
        return ["python"]
    return ["compiled", "python"]


# --------------------------------------------------------------------------- compile

def compile_model(model: SaModel) -> dict:
    """Flat arrays describing ``model`` (cached on the model instance)."""
    cached = model.__dict__.get("_flat")
    if cached is not None:
        return cached
    if len(model.clocks) > MAX_CLOCKS:
        raise ModelError(f"the compiled kernel supports at most {MAX_CLOCKS} clocks; "
                         "use SALSS_BACKEND=python for larger models")
    ci = model.clock_index
    dist_kind, dist_a, dist_b = [], [], []
    for c in model.clocks:
        d = model.delay_measures[c]
        if isinstance(d, Uniform):
            dist_kind.append(0); dist_a.append(d.lo); dist_b.append(d.hi)
        elif isinstance(d, Constant):
            dist_kind.append(1); dist_a.append(d.c); dist_b.append(0.0)
        elif isinstance(d, Exponential):
            dist_kind.append(2); dist_a.append(d.rate); dist_b.append(0.0)
        else:
            raise ModelError(f"unsupported distribution {d!r}")

    def mask(clocks) -> int:
        m = 0
        for c in clocks:
            m |= 1 << ci[c]
        return m

    loc_start, guard, restart, action, tgt_start, tgt_loc, tgt_cum = [0], [], [], [], [0], [], []
    for loc in model.locations:
        edges = model.outgoing(loc)
        if len(edges) > MAX_BRANCHING:
            raise ModelError(f"location {loc} has more than {MAX_BRANCHING} outgoing edges")
        for edge in edges:
            guard.append(mask(edge.guard))
            restart.append(mask(edge.restarts))
            action.append(model.action_index[edge.action])
            acc = 0.0
            for target, w in edge.targets:
                acc += w  # same running sum as semantics.sample_target
                tgt_loc.append(model.location_index[target])
                tgt_cum.append(acc)
            tgt_start.append(len(tgt_loc))
        loc_start.append(len(guard))

    i32 = lambda xs: np.asarray(xs, dtype=np.int32).reshape(-1)
    f64 = lambda xs: np.asarray(xs, dtype=np.float64).reshape(-1)
    flat = {
        "n_clocks": len(model.clocks),
        "initial": model.location_index[model.initial],
        "dist_kind": i32(dist_kind) if dist_kind else np.zeros(1, np.int32),
        "dist_a": f64(dist_a), "dist_b": f64(dist_b),
        "loc_start": i32(loc_start),
        "guard": np.asarray(guard, dtype=np.uint64).reshape(-1),
        "restart": np.asarray(restart, dtype=np.uint64).reshape(-1),
        "action": i32(action), "tgt_start": i32(tgt_start),
        "tgt_loc": i32(tgt_loc), "tgt_cum": f64(tgt_cum),
    }
    if _kernel is not None:
        flat["kmodel"] = _kernel.KModel(flat)
    model.__dict__["_flat"] = flat
    return flat


def _goal_mask(model: SaModel, goal: frozenset) -> np.ndarray:
    mask = np.zeros(len(model.locations), dtype=np.uint8)
    for loc in goal:
        mask[model.location_index[loc]] = 1
    return mask


def _view(cls: SchedulerClass, n: int) -> tuple:
    timing = {Timing.VALUES: 0, Timing.GLOBAL_TIME: 1, Timing.NEITHER: 2}[cls.timing]
    future = {Future.EXPIRATIONS: 0, Future.ORDER: 1, Future.NONE: 2}[cls.future]
    return (cls.tag, n, int(cls.history), timing, future)


def _krule(strategy: NamedStrategy, model: SaModel):
    cache = model.__dict__.setdefault("_rules", {})
    key = (strategy.rule_id, id(strategy))
    if key not in cache:
        cache[key] = (strategy, _kernel.KRule(compile_program(strategy, model)))
    return cache[key][1]


# --------------------------------------------------------------------------- runs

def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError("discretisation factor must be >= 1")


def lss_counts(model: SaModel, goal: frozenset, cls: SchedulerClass, n: int, ids,
               master_seed: int, run_start: int, runs: int, max_steps: int,
               jobs: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Per-id (reached, truncated) counts over runs ``run_start .. run_start+runs-1``.

    ``jobs`` splits the ids across threads; the result does not depend on it.
    """
    _check_n(n)
    ids = np.asarray(ids, dtype=np.uint32).reshape(-1)
    if _kernel is None:
        def work(chunk):
            r, t = _pykernel.lss_counts(model, goal, cls, n, chunk, master_seed, run_start, runs, max_steps)
            return np.asarray(r, np.int64), np.asarray(t, np.int64)
    else:
        km = compile_model(model)["kmodel"]
        gm = _goal_mask(model, goal)
        view = _view(cls, n)

        def work(chunk):
            return _kernel.lss_counts(km, gm, view, np.ascontiguousarray(chunk),
                                      master_seed, run_start, runs, max_steps)
    if jobs <= 1 or len(ids) < 2:
        return work(ids)
    chunks = [c for c in np.array_split(ids, min(jobs * 4, len(ids))) if len(c)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(work, chunks))
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def rule_counts(model: SaModel, goal: frozenset, strategy: NamedStrategy, seed: int,
                run_start: int, runs: int, max_steps: int) -> tuple[int, int]:
    if _kernel is None:
        return _pykernel.rule_counts(model, goal, strategy, seed, run_start, runs, max_steps)
    out = _kernel.rule_counts(compile_model(model)["kmodel"], _goal_mask(model, goal),
                              _krule(strategy, model), seed, run_start, runs, max_steps)
    if out is None:
        raise ContractViolation(f"strategy {strategy.rule_id} made an invalid choice")
    return out


def lss_detail(model: SaModel, goal: frozenset, cls: SchedulerClass, n: int, sid: int,
               master_seed: int, run_index: int, max_steps: int) -> RunDetail:
    _check_n(n)
    if _kernel is None:
        return _pykernel.lss_detail(model, goal, cls, n, sid, master_seed, run_index, max_steps)
    return RunDetail(*_kernel.lss_detail(compile_model(model)["kmodel"], _goal_mask(model, goal),
                                         _view(cls, n), sid, master_seed, run_index, max_steps))


def rule_detail(model: SaModel, goal: frozenset, strategy: NamedStrategy, seed: int,
                run_index: int, max_steps: int) -> RunDetail:
    if _kernel is None:
        return _pykernel.rule_detail(model, goal, strategy, seed, run_index, max_steps)
    out = RunDetail(*_kernel.rule_detail(compile_model(model)["kmodel"], _goal_mask(model, goal),
                                         _krule(strategy, model), seed, run_index, max_steps))
    if out.outcome < 0:
        raise ContractViolation(f"strategy {strategy.rule_id} made an invalid choice")
    return out
