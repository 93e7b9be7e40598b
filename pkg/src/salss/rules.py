"""A small condition language for fixed (non-sampled) strategies.

A strategy maps a location to ``when <conjunction> take <action> else <action>``.
Atoms compare two operands with ``<``, ``<=`` or ``==``; operands are

    v(c)   clock value          e(c)   expiration time
    r(c)   residual e(c)-v(c)   t      global elapsed time
    last   index of the last jump action (-1 before the first jump)
    3/4, 0.5, e1 ...  numeric constants; a bare action name means its index

Rules are evaluated identically by the Python engine and the compiled kernel.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ContractViolation
from .model import SaModel
from .observe import Future, Memory, SchedulerClass, Timing

KINDS = ("v", "e", "r", "t", "last", "const")
OPS = ("<", "<=", "==")

_ATOM = re.compile(r"^\s*(.+?)\s*(<=|==|<)\s*(.+?)\s*$")
_CLOCK_TERM = re.compile(r"^([ver])\(\s*(\w+)\s*\)$")


@dataclass(frozen=True)
class Operand:
    kind: str
    clock: str | None = None
    value: float = 0.0

    def evaluate(self, ctx) -> float:
        if self.kind == "const":
            return self.value
        if self.kind == "t":
            return ctx.elapsed
        if self.kind == "last":
            return -1.0 if ctx.last_action is None else float(ctx.model.action_index[ctx.last_action])
        v = ctx.state.values[self.clock]
        e = ctx.state.expirations[self.clock]
        return v if self.kind == "v" else e if self.kind == "e" else e - v


@dataclass(frozen=True)
class Atom:
    lhs: Operand
    op: str
    rhs: Operand

    def holds(self, ctx) -> bool:
        a, b = self.lhs.evaluate(ctx), self.rhs.evaluate(ctx)
        if self.op == "<":
            return a < b
        if self.op == "<=":
            return a <= b
        return a == b


@dataclass(frozen=True)
class Choice:
    when: tuple  # of Atom; empty means always
    then: str
    otherwise: str

    def pick(self, ctx) -> str:
        return self.then if all(a.holds(ctx) for a in self.when) else self.otherwise


def _operand(text: str, model: SaModel) -> Operand:
    text = text.strip()
    m = _CLOCK_TERM.match(text)
    if m:
        if m.group(2) not in model.clock_index:
            raise ValueError(f"unknown clock {m.group(2)!r}")
        return Operand(m.group(1), m.group(2))
    if text in ("t", "last"):
        return Operand(text)
    if text in model.action_index:
        return Operand("const", value=float(model.action_index[text]))
    try:
        return Operand("const", value=float(Fraction(text)))
    except ValueError:
        raise ValueError(f"cannot parse operand {text!r}") from None


def parse_condition(text: str, model: SaModel) -> tuple:
    text = text.strip()
    if text in ("", "true"):
        return ()
    atoms = []
    for part in re.split(r"\band\b", text):
        m = _ATOM.match(part)
        if not m:
            raise ValueError(f"cannot parse condition {part!r}")
        atoms.append(Atom(_operand(m.group(1), model), m.group(2), _operand(m.group(3), model)))
    return tuple(atoms)


def visible(atom: Atom, cls: SchedulerClass) -> bool:
    """Whether a scheduler of class ``cls`` can evaluate ``atom``."""
    kinds = {atom.lhs.kind, atom.rhs.kind} - {"const"}
    if kinds == {"r"} and cls.future is Future.ORDER:
        return True  # comparing two residuals is exactly expiration-order information
    need = {
        "v": cls.timing is Timing.VALUES,
        "t": cls.timing is Timing.GLOBAL_TIME,
        "e": cls.future is Future.EXPIRATIONS,
        "r": cls.timing is Timing.VALUES and cls.future is Future.EXPIRATIONS,
        "last": cls.memory is Memory.HISTORY,
    }
    return all(need[k] for k in kinds)


@dataclass(frozen=True)
class NamedStrategy:
    model: str
    rule_id: str
    cls: SchedulerClass  # information the rule is allowed to consult
    choices: dict  # location -> Choice
    description: str = ""

    def choose(self, ctx, enabled: list):
        """Edge taken among ``enabled`` (more than one means a real choice)."""
        if len(enabled) == 1:
            return enabled[0]
        loc = ctx.state.location
        if loc not in self.choices:
            raise ContractViolation(f"strategy {self.rule_id} has no rule for {loc}")
        action = self.choices[loc].pick(ctx)
        for edge in enabled:
            if edge.action == action:
                return edge
        raise ContractViolation(f"strategy {self.rule_id} picks {action} which is not enabled at {loc}")

    def check_confined(self) -> list[Atom]:
        """Atoms that consult information outside the declared class."""
        return [a for c in self.choices.values() for a in c.when if not visible(a, self.cls)]


def make_strategy(model: SaModel, rule_id: str, cls: str | SchedulerClass, rules: dict,
                  description: str = "") -> NamedStrategy:
    """``rules`` maps location -> (condition text, then-action, else-action)."""
    if isinstance(cls, str):
        cls = SchedulerClass.parse(cls)
    choices = {}
    for loc, (cond, then, otherwise) in rules.items():
        for action in (then, otherwise):
            model.edge(loc, action)
        choices[loc] = Choice(parse_condition(cond, model), then, otherwise)
    return NamedStrategy(model.name, rule_id, cls, choices, description)


def compile_program(strategy: NamedStrategy, model: SaModel) -> dict[str, np.ndarray]:
    """Flat arrays consumed by the compiled kernel."""
    nl = len(model.locations)
    then_act = np.full(nl, -1, dtype=np.int32)
    else_act = np.full(nl, -1, dtype=np.int32)
    start = np.zeros(nl + 1, dtype=np.int32)
    lk, lc, op, rk, rc, rv = [], [], [], [], [], []
    for i, loc in enumerate(model.locations):
        start[i] = len(lk)
        choice = strategy.choices.get(loc)
        if choice is None:
            continue
        then_act[i] = model.action_index[choice.then]
        else_act[i] = model.action_index[choice.otherwise]
        for atom in choice.when:
            for kinds, clocks, opnd in ((lk, lc, atom.lhs), (rk, rc, atom.rhs)):
                kinds.append(KINDS.index(opnd.kind))
                clocks.append(model.clock_index[opnd.clock] if opnd.clock else -1)
            rv.append(atom.rhs.value if atom.rhs.kind == "const" else 0.0)
            op.append(OPS.index(atom.op))
            if atom.lhs.kind == "const":
                raise ValueError("constant operands must be on the right-hand side")
    start[nl] = len(lk)
    i32 = lambda xs: np.asarray(xs, dtype=np.int32).reshape(-1)
    return {
        "then_act": then_act, "else_act": else_act, "atom_start": start,
        "lhs_kind": i32(lk), "lhs_clock": i32(lc), "op": i32(op),
        "rhs_kind": i32(rk), "rhs_clock": i32(rc), "rhs_const": np.asarray(rv, dtype=np.float64),
    }
