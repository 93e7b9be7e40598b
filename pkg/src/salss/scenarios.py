"""Experiment catalogue: the results table over the builtin models and the
class-ordering scenarios each model was built to separate.

Each table row pairs a model and scheduler class with the (p_min, p_max)
published for it and the discretisation factors that achieved it; rows are
grouped by the comparison they illustrate.
"""
from __future__ import annotations

from dataclasses import dataclass

from .builtins import builtin
from .observe import SchedulerClass
from .smc import EstimationParams, ExperimentResult, PairReport, compare, lss_experiment

FACTORS = (1, 2, 4)
TOL = 0.05
TOL_TIGHT = 0.02


@dataclass(frozen=True)
class Fig8Row:
    model: str
    group: str
    cls: str
    expected: tuple[float, float]
    n_set: tuple[int, ...]

    @property
    def tolerance(self) -> float:
        """Saturated (0, 1) and coin-flip (0.49, 0.51) entries are held to the tighter bound."""
        return TOL_TIGHT if self.expected in ((0.0, 1.0), (0.49, 0.51)) else TOL

    @property
    def scheduler_class(self) -> SchedulerClass:
        return SchedulerClass.parse(self.cls)


def _rows(model, group, *entries):
    return [Fig8Row(model, group, c, (lo, hi), ns) for c, lo, hi, ns in entries]


FIG8 = (
    *_rows("M1", "history: expirations vs order",
           ("hist:v,e", 0.24, 0.76, (2, 4)), ("hist:v,o", 0.49, 0.51, (1, 2, 4))),
    *_rows("M1", "clock values: expirations vs order",
           ("ml:v,e", 0.24, 0.76, (2, 4)), ("ml:v,o", 0.49, 0.51, (1, 2, 4))),
    *_rows("M1", "elapsed time: expirations vs order",
           ("ml:t,e", 0.24, 0.76, (2, 4)), ("ml:t,o", 0.49, 0.51, (1, 2, 4))),
    *_rows("M1", "location only: expirations vs order",
           ("ml:e", 0.24, 0.76, (2, 4)), ("ml:o", 0.49, 0.51, (1, 2, 4))),
    *_rows("M3", "values or history vs elapsed time",
           ("hist:t,e", 0.00, 1.00, (1,)), ("ml:v,e", 0.22, 0.78, (2,)), ("ml:t,e", 0.40, 0.60, (2,))),
    *_rows("M3", "elapsed time: expirations vs order",
           ("ml:t,e", 0.40, 0.60, (2,)), ("ml:t,o", 0.00, 1.00, (1,))),
    *_rows("M3", "location only: expirations vs order",
           ("ml:e", 0.38, 0.63, (2,)), ("ml:o", 0.00, 1.00, (1, 2, 4))),
    *_rows("M3", "non-prophetic: values or history vs elapsed time",
           ("hist:t", 0.00, 1.00, (1, 2)), ("ml:v", 0.22, 0.78, (4,)), ("ml:t", 0.49, 0.51, (1, 2, 4))),
    *_rows("M2", "ordered history vs memoryless",
           ("hist:o", 0.06, 0.94, (1, 2, 4)), ("ml:v,o", 0.18, 0.83, (1,))),
    *_rows("M4", "elapsed time vs location (prophetic)",
           ("ml:t,e", 0.25, 0.79, (1,)), ("ml:e", 0.29, 0.71, (1,))),
    *_rows("M4", "elapsed time vs location (non-prophetic)",
           ("ml:t", 0.22, 0.78, (2, 4)), ("ml:", 0.28, 0.72, (1, 2, 4))),
    *_rows("M5", "elapsed time within order",
           ("ml:t,o", 0.15, 0.86, (4,)), ("ml:o", 0.16, 0.84, (1, 2, 4))),
    *_rows("M6", "non-prophetic history vs memoryless",
           ("hist:v", 0.00, 1.00, (1, 2)), ("ml:v", 0.49, 0.51, (1, 2, 4))),
)

MODEL_ORDER = ("M1", "M3", "M2", "M4", "M5", "M6")


@dataclass(frozen=True)
class OrderingScenario:
    model: str
    stronger: str
    weaker: str
    relation: str  # strict | equal
    claim: str


def _strict(model, pairs, claim):
    return [OrderingScenario(model, a, b, "strict", claim) for a, b in pairs]


def _equal(model, classes, claim):
    head, *rest = classes
    return [OrderingScenario(model, head, c, "equal", claim) for c in rest]


ORDERINGS = (
    *_strict("M1", [("hist:v,e", "hist:v,o")], "expiration times beat expiration order under history"),
    *_strict("M1", [("ml:v,e", "ml:v,o")], "expiration times beat order given clock values"),
    *_strict("M1", [("ml:t,e", "ml:t,o")], "with elapsed time, times beat order on this model"),
    *_strict("M1", [("ml:e", "ml:o")], "with location only, times beat order on this model"),
    *_strict("M3", [("hist:t,e", "ml:t,e"), ("ml:v,e", "ml:t,e")],
             "history or clock values beat elapsed time"),
    *_strict("M3", [("ml:t,o", "ml:t,e")], "with elapsed time, order beats times on this model"),
    *_strict("M3", [("ml:o", "ml:e")], "with location only, order beats times on this model"),
    *_strict("M3", [("hist:t", "ml:t"), ("ml:v", "ml:t")],
             "non-prophetic: history or clock values beat elapsed time"),
    *_strict("M2", [("hist:o", "ml:v,o")], "history beats memoryless under expiration order"),
    *_strict("M4", [("ml:t,e", "ml:e")], "elapsed time adds power to expiration times"),
    *_strict("M4", [("ml:t", "ml:")], "elapsed time beats location only"),
    *_strict("M5", [("ml:t,o", "ml:o")], "elapsed time adds power to expiration order"),
    *_strict("M6", [("hist:v", "ml:v")], "non-prophetic history beats memoryless clock values"),
    *_strict("M0", [("hist:v,e", "hist:v")], "seeing the future beats any non-prophetic scheduler"),
    *_equal("M1", ["hist:v,e", "hist:t,e", "hist:e"], "history with times: values and elapsed time are redundant"),
    *_equal("M1", ["hist:v,o", "hist:t,o", "hist:o"], "history with order: values and elapsed time are redundant"),
    *_equal("M1", ["hist:v,e", "ml:v,e"], "values and times make history redundant"),
    *_equal("M6", ["hist:v", "hist:t", "hist:"], "non-prophetic history: values and elapsed time are redundant"),
)


class Runner:
    """Runs and memoises experiments so repeated (model, class, n) cells are computed once."""

    def __init__(self, params: EstimationParams, m: int, goal: str = "win", progress=None):
        self.params = params
        self.m = m
        self.goal = goal
        self.progress = progress
        self.cache: dict[tuple, ExperimentResult] = {}

    def result(self, model: str, cls: str, n: int) -> ExperimentResult:
        key = (model, cls, n)
        if key not in self.cache:
            sc = SchedulerClass.parse(cls)
            self.cache[key] = lss_experiment(builtin(model), self.goal, sc, n, self.m, self.params)
            if self.progress:
                self.progress(self.cache[key])
        return self.cache[key]

    def results(self, model: str, cls: str, factors=FACTORS) -> list[ExperimentResult]:
        return [self.result(model, cls, n) for n in factors]


@dataclass(frozen=True)
class Fig8Cell:
    row: Fig8Row
    p_min: float
    p_max: float
    n_set: tuple[int, ...]
    results: tuple[ExperimentResult, ...]

    @property
    def within(self) -> bool:
        lo, hi = self.row.expected
        tol = self.row.tolerance
        return abs(self.p_min - lo) <= tol and abs(self.p_max - hi) <= tol

    def deviation(self) -> float:
        lo, hi = self.row.expected
        return max(abs(self.p_min - lo), abs(self.p_max - hi))


def summarise(row: Fig8Row, results, epsilon: float) -> Fig8Cell:
    """Most extreme estimates over the factors, plus the factors that came within epsilon of both."""
    p_min = min(r.p_min for r in results)
    p_max = max(r.p_max for r in results)
    n_set = tuple(r.n for r in results if r.p_max >= p_max - epsilon and r.p_min <= p_min + epsilon)
    return Fig8Cell(row, p_min, p_max, n_set, tuple(results))


def run_fig8(runner: Runner, rows=FIG8, factors=FACTORS) -> list[Fig8Cell]:
    return [summarise(r, runner.results(r.model, r.cls, factors), runner.params.epsilon) for r in rows]


def best_pmax(runner: Runner, model: str, cls: str, factors=FACTORS) -> float:
    return max(r.p_max for r in runner.results(model, cls, factors))


def run_orderings(runner: Runner, scenarios=ORDERINGS, factors=FACTORS) -> list[PairReport]:
    out = []
    for s in scenarios:
        ps = best_pmax(runner, s.model, s.stronger, factors)
        pw = best_pmax(runner, s.model, s.weaker, factors)
        out.append(compare(s.model, s.stronger, s.weaker, s.relation, ps, pw, runner.params.epsilon))
    return out


def check_orderings_from_table(cells: list[Fig8Cell], epsilon: float) -> list[PairReport]:
    """Strict orderings whose classes both appear in ``cells`` (used by the fast preset)."""
    best = {(c.row.model, c.row.cls): c.p_max for c in cells}
    out = []
    for s in ORDERINGS:
        a, b = (s.model, s.stronger), (s.model, s.weaker)
        if s.relation == "strict" and a in best and b in best:
            out.append(compare(s.model, s.stronger, s.weaker, s.relation, best[a], best[b], epsilon))
    return out


def render_fig8(cells: list[Fig8Cell]) -> str:
    """One block per model; rows read ``<class>: (p_min, p_max)_{factors}``."""
    if not cells:
        return ""
    lines: list[str] = []
    models = [m for m in MODEL_ORDER if any(c.row.model == m for c in cells)]
    models += sorted({c.row.model for c in cells} - set(models))
    for model in models:
        lines.append(f"{model}:")
        group = None
        for cell in (c for c in cells if c.row.model == model):
            if cell.row.group != group:
                group = cell.row.group
                lines.append(f"  [{group}]")
            ns = ",".join(str(n) for n in cell.n_set)
            pretty = cell.row.scheduler_class.pretty
            lines.append(f"    {pretty}: ({cell.p_min:.2f}, {cell.p_max:.2f})_{{{ns}}}")
        lines.append("")
    return "\n".join(lines)
