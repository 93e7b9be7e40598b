"""The seven small distinguishing automata M0-M6.

Every model ends in the absorbing locations ``✓`` (goal set ``win``) and
``✗`` (goal set ``lose``). Edges are labelled e0, e1, ... per source
location, left branch first.
"""
from .errors import NotFound
from .model import Edge, SaModel, Uniform, build

WIN = "✓"
LOSE = "✗"
GOALS = {"win": [WIN], "lose": [LOSE]}


def _uni(hi):
    return Uniform(0.0, float(hi))


def _race(left: str, right: str, a: str, b: str):
    """Edges of the two terminal locations: in ``left`` clock ``a`` wins, in ``right`` clock ``b`` wins."""
    return [
        (left, Edge.to(WIN, "e0", guard={a})),
        (left, Edge.to(LOSE, "e1", guard={b})),
        (right, Edge.to(WIN, "e0", guard={b})),
        (right, Edge.to(LOSE, "e1", guard={a})),
    ]


def m0() -> SaModel:
    return build(
        "M0",
        ["l0", "l1", "l2", "l3", WIN, LOSE],
        [("x", _uni(1)), ("y", _uni(1))],
        [
            ("l0", Edge.to("l1", "e0", restarts={"x", "y"})),
            ("l1", Edge.to("l2", "e0")),
            ("l1", Edge.to("l3", "e1")),
            *_race("l2", "l3", "x", "y"),
        ],
        "l0",
        GOALS,
    )


def m1() -> SaModel:
    return build(
        "M1",
        ["l0", "l1", "l2", "l3", WIN, LOSE],
        [("x", _uni(1)), ("y", _uni(1))],
        [
            ("l0", Edge.to("l1", "e0", restarts={"x"})),
            ("l1", Edge.to("l2", "e0", restarts={"y"})),
            ("l1", Edge.to("l3", "e1", restarts={"y"})),
            *_race("l2", "l3", "x", "y"),
        ],
        "l0",
        GOALS,
    )


def m2() -> SaModel:
    return build(
        "M2",
        ["l0", "l1", "l2", "l3", "l4", WIN, LOSE],
        [("x", _uni(8)), ("y", _uni(1)), ("z", _uni(4))],
        [
            ("l0", Edge.to("l1", "e0", restarts={"x", "z"})),
            ("l1", Edge.to("l2", "e0", guard={"x"}, restarts={"z"})),
            ("l1", Edge.to("l2", "e1", guard={"z"}, restarts={"z"})),
            ("l2", Edge.to("l3", "e0", restarts={"y"})),
            ("l2", Edge.to("l4", "e1", restarts={"y"})),
            *_race("l3", "l4", "x", "y"),
        ],
        "l0",
        GOALS,
    )


def m3() -> SaModel:
    return build(
        "M3",
        ["l0", "l1", "l2", "l3", "l4", "l5", WIN, LOSE],
        [("x", _uni(1)), ("y", _uni(1)), ("z", _uni(1))],
        [
            ("l0", Edge.to("l1", "e0", restarts={"z"})),
            ("l1", Edge.to("l2", "e0", guard={"z"}, restarts={"x", "y", "z"})),
            ("l2", Edge.to("l3", "e0", guard={"x"}, restarts={"y"})),
            ("l2", Edge.to("l3", "e1", guard={"y"}, restarts={"x"})),
            ("l3", Edge.to("l4", "e0")),
            ("l3", Edge.to("l5", "e1")),
            *_race("l4", "l5", "x", "y"),
        ],
        "l0",
        GOALS,
    )


def m4() -> SaModel:
    return build(
        "M4",
        ["l0", "l1", "l2", "l3", "l4", WIN, LOSE],
        [("x", _uni(2)), ("y", _uni(1)), ("z", _uni(2))],
        [
            ("l0", Edge.to("l1", "e0", restarts={"x", "z"})),
            ("l1", Edge.to("l2", "e0", guard={"z"}, restarts={"y", "z"})),
            ("l2", Edge.to("l3", "e0")),
            ("l2", Edge.to("l4", "e1")),
            *_race("l3", "l4", "x", "y"),
        ],
        "l0",
        GOALS,
    )


def m5() -> SaModel:
    # drawn starting at l1
    return build(
        "M5",
        ["l1", "l2", "l3", "l4", "l5", WIN, LOSE],
        [("x", _uni(1)), ("y", _uni(1))],
        [
            ("l1", Edge.to("l2", "e0", restarts={"x", "y"})),
            ("l2", Edge.to("l3", "e0", guard={"y"}, restarts={"y"})),
            ("l3", Edge.to("l4", "e0", restarts={"y"})),
            ("l3", Edge.to("l5", "e1", restarts={"y"})),
            *_race("l4", "l5", "x", "y"),
        ],
        "l1",
        GOALS,
    )


def m6() -> SaModel:
    return build(
        "M6",
        ["l0", "l1", "l2", "l3", "l4", WIN, LOSE],
        [("x", _uni(1)), ("y", _uni(1))],
        [
            ("l0", Edge.to("l1", "e0", restarts={"x", "y"})),
            ("l1", Edge.to("l2", "e0", guard={"x"})),
            ("l1", Edge.to("l2", "e1", guard={"y"})),
            ("l2", Edge.to("l3", "e0")),
            ("l2", Edge.to("l4", "e1")),
            *_race("l3", "l4", "x", "y"),
        ],
        "l0",
        GOALS,
    )


_BUILDERS = {"M0": m0, "M1": m1, "M2": m2, "M3": m3, "M4": m4, "M5": m5, "M6": m6}
NAMES = tuple(_BUILDERS)
_CACHE: dict[str, SaModel] = {}


def builtin(name: str) -> SaModel:
    key = name.upper()
    if key not in _BUILDERS:
        raise NotFound(f"unknown built-in model {name!r} (known: {', '.join(NAMES)})")
    if key not in _CACHE:
        _CACHE[key] = _BUILDERS[key]()
    return _CACHE[key]
