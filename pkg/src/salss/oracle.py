"""Reference values: hand-written strategies for the builtin models and the
exact reachability constants they are known to attain.

The strategies bypass scheduler sampling entirely, so they give an
independent check on the simulator: a strategy estimated by plain Monte
Carlo must land on its closed-form value.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .builtins import builtin
from .errors import NotFound
from .rules import NamedStrategy, make_strategy
from .smc import Estimate, EstimationParams, estimate

# model -> rule id -> (declared class, {location: (condition, then, else)}, description)
CATALOGUE = {
    "M0": {
        "left-iff-x-before-y": ("ml:o", {"l1": ("r(x) < r(y)", "e0", "e1")},
                                "enter the race that x wins whenever x will expire first"),
        "always-ℓ2": ("ml:", {"l1": ("true", "e0", "e1")},
                      "always enter l2, ignoring all clock information"),
    },
    "M1": {
        "x-threshold-1/2": ("ml:e", {"l1": ("e(x) <= 1/2", "e0", "e1")},
                            "bet on x exactly when its expiration time is at most 1/2"),
    },
    "M2": {
        "left-iff-x-before-z": ("ml:o", {"l2": ("r(x) < r(z)", "e0", "e1")},
                                "go left when x expires before z"),
        "left-iff-x-before-z-and-vx<35/12": (
            "ml:v,o", {"l2": ("r(x) < r(z) and v(x) < 35/12", "e0", "e1")},
            "go left when x expires before z and x has not run for too long"),
    },
    "M4": {
        "always-ℓ3": ("ml:", {"l2": ("true", "e0", "e1")}, "always enter l3"),
        "always-ℓ4": ("ml:", {"l2": ("true", "e1", "e0")}, "always enter l4"),
        "ℓ3-iff-t≤1/2": ("ml:t", {"l2": ("t <= 1/2", "e0", "e1")},
                         "enter l3 when at most 1/2 time units have elapsed"),
        # x has most likely expired by a late arrival at l2, which favours l3;
        # this orientation is the optimal time threshold (value 37/48)
        "ℓ4-iff-t≤1/2": ("ml:t", {"l2": ("t <= 1/2", "e1", "e0")},
                         "enter l4 when at most 1/2 time units have elapsed, l3 otherwise"),
    },
    "M6": {
        "by-incoming-edge": ("hist:v", {"l2": ("last == e0", "e0", "e1")},
                             "follow the clock whose expiry brought the run to l2"),
    },
}


def _norm(rule_id: str) -> str:
    """ASCII spelling accepted on the command line: always-l3, l3-iff-t<=1/2."""
    return rule_id.replace("ℓ", "l").replace("≤", "<=")


@lru_cache(maxsize=None)
def named_strategy(model: str, rule_id: str) -> NamedStrategy:
    rules = CATALOGUE.get(model.upper())
    if rules is None:
        raise NotFound(f"no strategies for model {model!r}")
    for rid, (cls, table, desc) in rules.items():
        if rule_id in (rid, _norm(rid)):
            return make_strategy(builtin(model), rid, cls, table, desc)
    raise NotFound(f"unknown strategy {rule_id!r} for {model}; known: {', '.join(rules)}")


def strategies() -> list[tuple[str, str]]:
    return [(m, r) for m, rules in CATALOGUE.items() for r in rules]


def mc_reference(model: str, strategy: NamedStrategy | str, runs: int, seed: int,
                 delta: float = 0.01, goal: str = "win", max_steps: int = 100) -> Estimate:
    """Plain Monte Carlo estimate of a named strategy's reachability probability."""
    if isinstance(strategy, str):
        strategy = named_strategy(model, strategy)
    params = EstimationParams(epsilon=0.5, delta=delta, max_steps=max_steps, master_seed=seed, strict=True)
    sa = builtin(model)
    return estimate(sa, sa.goal(goal), strategy, runs, params)


@dataclass(frozen=True)
class ReferenceEntry:
    model: str
    scenario: str
    value: Fraction
    derivation: str
    approximate: bool = False
    tolerance: float = 0.0

    def as_float(self) -> float:
        return float(self.value)


_TABLE = (
    ReferenceEntry("M0", "non-prophetic", Fraction(1, 2),
                   "without future information both races are fair coin flips"),
    ReferenceEntry("M0", "prophetic-max", Fraction(1),
                   "knowing which clock expires first wins every race"),
    ReferenceEntry("M1", "x-threshold-1/2", Fraction(3, 4),
                   "E[max(e(x), 1 - e(x))] for e(x) ~ Uni(0,1)"),
    ReferenceEntry("M2", "left-iff-x-before-z", Fraction(77, 96),
                   "integral over the l1 race outcome and the final x/y race"),
    ReferenceEntry("M2", "left-iff-x-before-z-and-vx<35/12", Fraction(7561, 9216),
                   "as above, switching sides once v(x) reaches the break-even point 35/12"),
    ReferenceEntry("M4", "uninformed-max", Fraction(17, 24),
                   "best of the two constant choices at l2"),
    ReferenceEntry("M4", "time-aware", Fraction(771, 1000),
                   "threshold 1/2 on elapsed time at l2; integrating P(win | l3, t) = t/2 + 1/4 "
                   "(t < 1) over t ~ Uni(0,2) gives 37/48",
                   approximate=True, tolerance=0.01),
    ReferenceEntry("M3", "hist-t-e", Fraction(1),
                   "the incoming edge reveals which clock already expired"),
    ReferenceEntry("M4", "time-threshold-literal", Fraction(11, 48),
                   "the same threshold with the branches the other way round: 1 - 37/48"),
    ReferenceEntry("M6", "hist-v", Fraction(1),
                   "the incoming edge reveals which clock already expired"),
)

# reference entries reproduced by a single named strategy
STRATEGY_FOR = {
    ("M0", "non-prophetic"): "always-ℓ2",
    ("M0", "prophetic-max"): "left-iff-x-before-y",
    ("M1", "x-threshold-1/2"): "x-threshold-1/2",
    ("M2", "left-iff-x-before-z"): "left-iff-x-before-z",
    ("M2", "left-iff-x-before-z-and-vx<35/12"): "left-iff-x-before-z-and-vx<35/12",
    ("M4", "time-aware"): "ℓ4-iff-t≤1/2",
    ("M4", "time-threshold-literal"): "ℓ3-iff-t≤1/2",
    ("M6", "hist-v"): "by-incoming-edge",
}


def reference_table() -> list[ReferenceEntry]:
    return list(_TABLE)


def lookup(model: str, scenario: str) -> ReferenceEntry:
    for entry in _TABLE:
        if entry.model == model and entry.scenario == scenario:
            return entry
    raise NotFound(f"no reference value for {model}/{scenario}")


def table_csv() -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["model", "scenario", "value", "float", "approximate", "tolerance", "derivation"])
    for e in _TABLE:
        w.writerow([e.model, e.scenario, str(e.value), f"{float(e.value):.6f}",
                    int(e.approximate), e.tolerance, e.derivation])
    return buf.getvalue()


__all__ = ["CATALOGUE", "ReferenceEntry", "named_strategy", "strategies", "mc_reference",
           "reference_table", "lookup", "table_csv", "STRATEGY_FOR"]
