"""Stochastic automata: types, well-formedness checks and the JSON model format."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Mapping, Union

from .errors import InvalidModel, NotFound, ParseError

WEIGHT_TOLERANCE = 1e-9
MAX_CLOCKS = 64  # clock sets are bitmasks in the compiled kernel


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def sample(self, u: float) -> float:
        return self.lo + u * (self.hi - self.lo)

    def problems(self) -> list[str]:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            return ["bounds must be finite"]
        out = []
        if self.lo < 0:
            out.append(f"lower bound {self.lo} is negative")
        if not self.lo < self.hi:
            out.append(f"requires lo < hi, got lo={self.lo}, hi={self.hi}")
        return out

    def to_json(self) -> dict:
        return {"dist": "uniform", "lo": self.lo, "hi": self.hi}

    def __str__(self) -> str:
        return f"Uni({self.lo:g}, {self.hi:g})"


@dataclass(frozen=True)
class Constant:
    c: float

    def sample(self, u: float) -> float:
        return self.c

    def problems(self) -> list[str]:
        if not (math.isfinite(self.c) and self.c >= 0):
            return [f"constant must be a finite non-negative number, got {self.c}"]
        return []

    def to_json(self) -> dict:
        return {"dist": "constant", "c": self.c}

    def __str__(self) -> str:
        return f"Const({self.c:g})"


@dataclass(frozen=True)
class Exponential:
    rate: float

    def sample(self, u: float) -> float:
        return -math.log(1.0 - u) / self.rate

    def problems(self) -> list[str]:
        if not (math.isfinite(self.rate) and self.rate > 0):
            return [f"rate must be positive, got {self.rate}"]
        return []

    def to_json(self) -> dict:
        return {"dist": "exponential", "rate": self.rate}

    def __str__(self) -> str:
        return f"Exp({self.rate:g})"


DistributionSpec = Union[Uniform, Constant, Exponential]


@dataclass(frozen=True)
class Edge:
    """One outgoing edge: guard clocks, action label, restart set, target distribution."""

    action: str
    guard: frozenset = frozenset()
    restarts: frozenset = frozenset()
    targets: tuple = ()  # ((location, weight), ...)

    @classmethod
    def to(cls, target: str, action: str, guard=(), restarts=()) -> "Edge":
        return cls(action, frozenset(guard), frozenset(restarts), ((target, 1.0),))


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass(frozen=True, eq=True)
class SaModel:
    name: str
    locations: tuple
    clocks: tuple
    actions: tuple
    delay_measures: Mapping[str, DistributionSpec]
    edges: Mapping[str, tuple]
    initial: str
    goals: Mapping[str, frozenset] = field(default_factory=dict)

    @cached_property
    def location_index(self) -> dict[str, int]:
        return {loc: i for i, loc in enumerate(self.locations)}

    @cached_property
    def clock_index(self) -> dict[str, int]:
        return {c: i for i, c in enumerate(self.clocks)}

    @cached_property
    def action_index(self) -> dict[str, int]:
        return {a: i for i, a in enumerate(self.actions)}

    def outgoing(self, location: str) -> tuple:
        return self.edges.get(location, ())

    def edge(self, location: str, action: str) -> Edge:
        for e in self.outgoing(location):
            if e.action == action:
                return e
        raise KeyError(f"no edge {action!r} from {location!r}")

    def goal(self, name: str) -> frozenset:
        try:
            return self.goals[name]
        except KeyError:
            raise NotFound(f"model {self.name} has no goal set {name!r} "
                           f"(known: {', '.join(sorted(self.goals))})") from None

    def summary(self) -> str:
        dists = ", ".join(f"{c}: {self.delay_measures[c]}" for c in self.clocks)
        return f"{self.name}: {len(self.locations)} locations, clocks {dists}"


def build(name, locations, clocks, edges, initial, goals) -> SaModel:
    # clocks: (name, DistributionSpec) pairs; edges: (source, Edge) pairs
    """Assemble a model; the action alphabet is collected from the edges in location order."""
    by_loc = {}
    for src, edge in edges:
        by_loc.setdefault(src, []).append(edge)
    order = list(locations) + [l for l in by_loc if l not in set(locations)]
    actions = []
    for loc in order:
        for edge in by_loc.get(loc, ()):
            if edge.action not in actions:
                actions.append(edge.action)
    return SaModel(
        name=name,
        locations=tuple(locations),
        clocks=tuple(c for c, _ in clocks),
        actions=tuple(actions),
        delay_measures=dict(clocks),
        edges={loc: tuple(es) for loc, es in by_loc.items()},
        initial=initial,
        goals={g: frozenset(locs) for g, locs in goals.items()},
    )


def validate(model: SaModel) -> list[Violation]:
    out: list[Violation] = []

    def bad(code, msg):
        out.append(Violation(code, msg))

    if len(set(model.locations)) != len(model.locations):
        bad("DuplicateLocation", "location ids are not unique")
    if len(set(model.clocks)) != len(model.clocks):
        bad("DuplicateClock", "clock ids are not unique")
    if len(model.clocks) > MAX_CLOCKS:
        bad("TooManyClocks", f"at most {MAX_CLOCKS} clocks are supported")
    locs = set(model.locations)
    clocks = set(model.clocks)
    if model.initial not in locs:
        bad("BadInitial", f"initial location {model.initial!r} is not a location")
    for c in model.clocks:
        dist = model.delay_measures.get(c)
        if dist is None:
            bad("MissingDistribution", f"clock {c!r} has no delay measure")
            continue
        for p in dist.problems():
            bad("BadDistribution", f"clock {c!r}: {p}")
    for c in model.delay_measures:
        if c not in clocks:
            bad("UnknownClock", f"delay measure given for undeclared clock {c!r}")
    for src, edges in model.edges.items():
        if src not in locs:
            bad("UnknownLocation", f"edges leave undeclared location {src!r}")
        seen = set()
        for e in edges:
            if e.action in seen:
                bad("DuplicateAction", f"two edges from {src!r} share action {e.action!r}")
            seen.add(e.action)
            if e.action not in model.actions:
                bad("UnknownAction", f"action {e.action!r} is not in the alphabet")
            for c in sorted((e.guard | e.restarts) - clocks):
                bad("UnknownClock", f"edge {src}/{e.action} uses undeclared clock {c!r}")
            if not e.targets:
                bad("BadWeights", f"edge {src}/{e.action} has no targets")
                continue
            total = 0.0
            for tgt, w in e.targets:
                if tgt not in locs:
                    bad("UnknownLocation", f"edge {src}/{e.action} targets undeclared {tgt!r}")
                if not w > 0:
                    bad("BadWeights", f"edge {src}/{e.action} has non-positive weight {w}")
                total += w
            if abs(total - 1.0) > WEIGHT_TOLERANCE:
                bad("BadWeights", f"edge {src}/{e.action} weights sum to {total}")
    for g, members in model.goals.items():
        for loc in sorted(set(members) - locs):
            bad("UnknownLocation", f"goal set {g!r} contains undeclared {loc!r}")
    return out


def check(model: SaModel) -> SaModel:
    problems = validate(model)
    if problems:
        raise InvalidModel(problems)
    return model


# -- JSON model files -------------------------------------------------------

def to_json(model: SaModel) -> dict:
    edges = []
    for loc in model.locations:
        for e in model.outgoing(loc):
            edges.append({
                "from": loc,
                "action": e.action,
                "guard": [c for c in model.clocks if c in e.guard],
                "restart": [c for c in model.clocks if c in e.restarts],
                "targets": [{"to": t, "weight": w} for t, w in e.targets],
            })
    return {
        "name": model.name,
        "clocks": {c: model.delay_measures[c].to_json() for c in model.clocks},
        "locations": list(model.locations),
        "initial": model.initial,
        "edges": edges,
        "goals": {g: [l for l in model.locations if l in members]
                  for g, members in model.goals.items()},
    }


def _dist_from_json(name, obj) -> DistributionSpec:
    if not isinstance(obj, dict) or "dist" not in obj:
        raise ParseError(f"clock {name!r}: expected an object with key 'dist'")
    kind = obj["dist"]
    try:
        if kind == "uniform":
            return Uniform(float(obj["lo"]), float(obj["hi"]))
        if kind == "constant":
            return Constant(float(obj["c"]))
        if kind == "exponential":
            return Exponential(float(obj["rate"]))
    except KeyError as exc:
        raise ParseError(f"clock {name!r}: missing parameter {exc.args[0]!r}") from None
    except (TypeError, ValueError):
        raise ParseError(f"clock {name!r}: parameters must be numbers") from None
    raise ParseError(f"clock {name!r}: unknown distribution {kind!r}")


def from_json(obj, default_name: str = "model") -> SaModel:
    if not isinstance(obj, dict):
        raise ParseError("model file must contain a JSON object")
    for key in ("clocks", "locations", "initial", "edges"):
        if key not in obj:
            raise ParseError(f"missing required key {key!r}")
    clocks = obj["clocks"]
    if not isinstance(clocks, dict):
        raise ParseError("'clocks' must map clock names to distributions")
    i = -1
    try:
        edges = []
        for i, e in enumerate(obj["edges"]):
            targets = tuple((t["to"], float(t["weight"])) for t in e["targets"])
            edges.append((e["from"], Edge(e["action"], frozenset(e.get("guard", ())),
                                          frozenset(e.get("restart", ())), targets)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed edge #{i}: {exc}") from None
    goals = obj.get("goals", {})
    if not isinstance(goals, dict):
        raise ParseError("'goals' must map names to location lists")
    return build(
        name=obj.get("name", default_name),
        locations=list(obj["locations"]),
        clocks=[(c, _dist_from_json(c, d)) for c, d in clocks.items()],
        edges=edges,
        initial=obj["initial"],
        goals=goals,
    )


def loads(text: str, default_name: str = "model", strict: bool = True) -> SaModel:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    model = from_json(obj, default_name)
    return check(model) if strict else model


def load(path, strict: bool = True) -> SaModel:
    path = Path(path)
    return loads(path.read_text(encoding="utf-8"), default_name=path.stem, strict=strict)


def dumps(model: SaModel) -> str:
    return json.dumps(to_json(model), indent=2, ensure_ascii=False) + "\n"


def save(model: SaModel, path) -> None:
    Path(path).write_text(dumps(model), encoding="utf-8")
