"""Statistical model checking: run outcomes, Hoeffding estimates and the
two-stage scheduler-sampling experiment."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import backend
from .errors import TruncationError
from .lss import LssScheduler, sample_ids
from .model import SaModel
from .observe import SchedulerClass
from .rules import NamedStrategy

DEFAULT_SEED = 1


class RunOutcome(Enum):
    NOT_REACHED = backend.NOT_REACHED
    REACHED = backend.REACHED
    TRUNCATED = backend.TRUNCATED


@dataclass(frozen=True)
class EstimationParams:
    epsilon: float = 0.01
    delta: float = 0.05
    max_steps: int = 100
    master_seed: int = DEFAULT_SEED
    strict: bool = False
    stage1_floor: int = 100  # minimum stage-1 runs per scheduler
    keep: int = 10  # schedulers re-estimated at each extreme in stage 2
    jobs: int = 1

    def __post_init__(self):
        if not 0 < self.epsilon < 1 or not 0 < self.delta < 1:
            raise ValueError("epsilon and delta must lie in (0, 1)")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")
        if not 0 <= self.master_seed < 1 << 64:
            raise ValueError("master seed must be a 64-bit unsigned integer")


def okamoto_runs(epsilon: float, delta: float) -> int:
    """Runs needed for |p_hat - p| <= epsilon with probability >= 1 - delta."""
    if not 0 < epsilon < 1 or not 0 < delta < 1:
        raise ValueError("epsilon and delta must lie in (0, 1)")
    return math.ceil(math.log(2 / delta) / (2 * epsilon * epsilon))


def half_width(runs: int, delta: float) -> float:
    return math.sqrt(math.log(2 / delta) / (2 * runs))


@dataclass(frozen=True)
class Estimate:
    p_hat: float
    half_width: float
    reached: int
    truncated: int
    runs: int


def _estimate(reached: int, truncated: int, runs: int, params: EstimationParams, what: str) -> Estimate:
    if truncated and params.strict:
        raise TruncationError(f"{truncated} of {runs} runs of {what} hit the {params.max_steps}-step bound")
    return Estimate(reached / runs, half_width(runs, params.delta), reached, truncated, runs)


def simulate_run(model: SaModel, goal: frozenset, sched: LssScheduler, params: EstimationParams,
                 run_index: int) -> RunOutcome:
    detail = backend.lss_detail(model, goal, sched.cls, sched.n, sched.id, params.master_seed,
                                run_index, params.max_steps)
    return RunOutcome(detail.outcome)


def estimate(model: SaModel, goal: frozenset, sched: LssScheduler | NamedStrategy, runs: int,
             params: EstimationParams, run_start: int = 0) -> Estimate:
    """Reachability estimate of one scheduler (sampled or named) over ``runs`` runs."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if isinstance(sched, NamedStrategy):
        r, t = backend.rule_counts(model, goal, sched, params.master_seed, run_start, runs, params.max_steps)
        what = sched.rule_id
    else:
        rs, ts = backend.lss_counts(model, goal, sched.cls, sched.n, [sched.id], params.master_seed,
                                    run_start, runs, params.max_steps)
        r, t = int(rs[0]), int(ts[0])
        what = f"scheduler {sched.id}"
    return _estimate(int(r), int(t), runs, params, what)


@dataclass(frozen=True)
class ExperimentResult:
    model: str
    goal: str
    cls: SchedulerClass
    n: int
    m: int
    p_min: float
    p_max: float
    argmin_id: int
    argmax_id: int
    runs_stage1: int
    runs_stage2: int
    truncated: int
    epsilon: float = field(default=0.01, compare=False)

    def row(self) -> dict:
        return {
            "model": self.model, "goal": self.goal, "class": self.cls.spec, "n": self.n, "m": self.m,
            "p_min": f"{self.p_min:.4f}", "p_max": f"{self.p_max:.4f}",
            "argmin_id": self.argmin_id, "argmax_id": self.argmax_id,
            "runs_stage1": self.runs_stage1, "runs_stage2": self.runs_stage2,
            "truncated": self.truncated,
        }


CSV_FIELDS = ("model", "goal", "class", "n", "m", "p_min", "p_max", "argmin_id", "argmax_id",
              "runs_stage1", "runs_stage2", "truncated")


def to_csv(results) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in results:
        writer.writerow(r.row())
    return buf.getvalue()


def _extremes(ids: np.ndarray, score: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Ids of the k highest and k lowest scores; ties broken by smaller id."""
    top = np.lexsort((ids, -score))[:k]
    bottom = np.lexsort((ids, score))[:k]
    return ids[top], ids[bottom]


def lss_experiment(model: SaModel, goal_name: str, cls: SchedulerClass, n: int, m: int,
                   params: EstimationParams) -> ExperimentResult:
    """Sample ``m`` schedulers of ``cls`` and estimate the extreme reachability probabilities.

    Stage 1 screens every scheduler with a coarse budget; stage 2 re-estimates
    the most and least successful ones with fresh runs at full precision.
    Truncated runs count against a scheduler when ranking for the maximum and
    for it when ranking for the minimum.
    """
    if m < 1:
        raise ValueError("need at least one scheduler")
    goal = model.goal(goal_name)
    ids = np.asarray(sample_ids(m, params.master_seed), dtype=np.uint32)
    n1 = max(params.stage1_floor, okamoto_runs(min(10 * params.epsilon, 0.999), params.delta))
    reached, trunc = backend.lss_counts(model, goal, cls, n, ids, params.master_seed, 0, n1,
                                        params.max_steps, jobs=params.jobs)
    top, _ = _extremes(ids, reached.astype(np.int64), params.keep)
    _, low = _extremes(ids, (reached + trunc).astype(np.int64), params.keep)
    finalists = np.unique(np.concatenate([top, low]))
    n2 = okamoto_runs(params.epsilon, params.delta)
    r2, t2 = backend.lss_counts(model, goal, cls, n, finalists, params.master_seed, n1, n2,
                                params.max_steps, jobs=params.jobs)
    by_id = {int(s): (int(a), int(b)) for s, a, b in zip(finalists, r2, t2)}
    # the reported extremes are the fresh estimates; truncations again count conservatively
    hi_id = min((int(s) for s in top), key=lambda s: (-by_id[s][0], s))
    lo_id = min((int(s) for s in low), key=lambda s: (sum(by_id[s]), s))
    total_trunc = int(trunc.sum()) + int(t2.sum())
    if total_trunc and params.strict:
        raise TruncationError(f"{total_trunc} runs hit the {params.max_steps}-step bound")
    return ExperimentResult(
        model=model.name, goal=goal_name, cls=cls, n=n, m=m,
        p_min=sum(by_id[lo_id]) / n2, p_max=by_id[hi_id][0] / n2,
        argmin_id=lo_id, argmax_id=hi_id,
        runs_stage1=n1 * m, runs_stage2=n2 * len(finalists), truncated=total_trunc,
        epsilon=params.epsilon,
    )


# --------------------------------------------------------------------------- hierarchy

@dataclass(frozen=True)
class PairReport:
    model: str
    stronger: str
    weaker: str
    relation: str  # "strict", "weak" or "equal"
    p_stronger: float
    p_weaker: float
    slack: float
    passed: bool

    def line(self) -> str:
        sym = {"strict": "≻", "weak": "≽", "equal": "≈"}[self.relation]
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict}  {self.model}: {self.stronger} {sym} {self.weaker}  "
                f"({self.p_stronger:.3f} vs {self.p_weaker:.3f}, slack {self.slack:.3f})")


def compare(model: str, stronger: str, weaker: str, relation: str, p_s: float, p_w: float,
            epsilon: float) -> PairReport:
    """Strict pairs need a gap above 2·epsilon; equal pairs must agree within 2·epsilon."""
    slack = 2 * epsilon
    if relation == "strict":
        ok = p_s - p_w > slack
    elif relation == "equal":
        ok = abs(p_s - p_w) <= slack
    elif relation == "weak":
        ok = p_s >= p_w - slack
    else:
        raise ValueError(f"unknown relation {relation!r}")
    return PairReport(model, stronger, weaker, relation, p_s, p_w, slack, ok)


def best_pmax(model: SaModel, goal: str, cls: SchedulerClass, n_set, m: int,
              params: EstimationParams, cache: dict | None = None) -> float:
    """Largest p_max over the discretisation factors in ``n_set``."""
    best = 0.0
    for n in n_set:
        key = (model.name, goal, cls.spec, n, m, params)
        if cache is not None and key in cache:
            res = cache[key]
        else:
            res = lss_experiment(model, goal, cls, n, m, params)
            if cache is not None:
                cache[key] = res
        best = max(best, res.p_max)
    return best


def hierarchy_check(model: SaModel, goal: str, pairs, n_set, m: int, params: EstimationParams,
                    cache: dict | None = None) -> list[PairReport]:
    """``pairs`` holds (stronger spec, weaker spec, relation) triples."""
    out = []
    for stronger, weaker, relation in pairs:
        ps = best_pmax(model, goal, SchedulerClass.parse(stronger), n_set, m, params, cache)
        pw = best_pmax(model, goal, SchedulerClass.parse(weaker), n_set, m, params, cache)
        out.append(compare(model.name, stronger, weaker, relation, ps, pw, params.epsilon))
    return out


__all__ = ["RunOutcome", "EstimationParams", "Estimate", "ExperimentResult", "PairReport",
           "okamoto_runs", "half_width", "simulate_run", "estimate", "lss_experiment",
           "hierarchy_check", "best_pmax", "compare", "to_csv", "CSV_FIELDS"]
