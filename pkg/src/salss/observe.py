"""Scheduler classes as projections of run contexts onto canonical byte keys.

A key is a sequence of little-endian u64 fields::

    [class tag, n, location index, (history digest), v..., t, e..., ranks...]

where only the components visible to the class are present, clock
components in model clock order. History classes additionally fold every
step record (pre-state key plus encoded label) into a running FNV-1a digest.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Mapping

from .rng import FNV_OFFSET, MASK64, fnv1a64

if TYPE_CHECKING:
    from .semantics import RunContext, StepLabel


class Memory(Enum):
    HISTORY = "hist"
    MEMORYLESS = "ml"


class Timing(Enum):
    VALUES = "v"
    GLOBAL_TIME = "t"
    NEITHER = ""


class Future(Enum):
    EXPIRATIONS = "e"
    ORDER = "o"
    NONE = ""


_MEMORY = list(Memory)
_TIMING = list(Timing)
_FUTURE = list(Future)


@dataclass(frozen=True)
class SchedulerClass:
    memory: Memory
    timing: Timing
    future: Future

    @property
    def tag(self) -> int:
        return (_MEMORY.index(self.memory) * 9 + _TIMING.index(self.timing) * 3
                + _FUTURE.index(self.future))

    @property
    def history(self) -> bool:
        return self.memory is Memory.HISTORY

    @property
    def prophetic(self) -> bool:
        return self.future is not Future.NONE

    @property
    def spec(self) -> str:
        """Canonical command-line spelling, e.g. ``hist:v,e`` or ``ml:``."""
        parts = [p.value for p in (self.timing, self.future) if p.value]
        return f"{self.memory.value}:{','.join(parts)}"

    @property
    def pretty(self) -> str:
        parts = ["ℓ"] + [p.value for p in (self.timing, self.future) if p.value]
        return f"{self.memory.value} {','.join(parts)}"

    @classmethod
    def parse(cls, text: str) -> "SchedulerClass":
        head, sep, tail = text.strip().partition(":")
        try:
            memory = Memory(head)
        except ValueError:
            raise ValueError(f"bad scheduler class {text!r}: must start with 'hist:' or 'ml:'") from None
        if not sep:
            raise ValueError(f"bad scheduler class {text!r}: missing ':'")
        items = [p.strip() for p in tail.split(",") if p.strip()]
        timing, future = Timing.NEITHER, Future.NONE
        for item in items:
            if item in ("v", "t") and timing is Timing.NEITHER:
                timing = Timing(item)
            elif item in ("e", "o") and future is Future.NONE:
                future = Future(item)
            else:
                raise ValueError(f"bad scheduler class {text!r}: unexpected {item!r}")
        return cls(memory, timing, future)

    def __str__(self) -> str:
        return self.spec


ALL_CLASSES = tuple(SchedulerClass(m, t, f) for m in Memory for t in Timing for f in Future)


@dataclass(frozen=True)
class ObservationTrace:
    digest: int = FNV_OFFSET
    steps: int = 0


def discretise(x: float, n: int) -> int:
    """Index i of the cell [i/n, (i+1)/n) containing x."""
    if n < 1:
        raise ValueError("discretisation factor must be >= 1")
    return min(math.floor(x * n), MASK64)


def expiration_order(v: Mapping[str, float], e: Mapping[str, float]) -> dict[str, int]:
    """Dense ranks of the residual lifetimes e(c) - v(c); equal residuals share a rank."""
    residual = {c: e[c] - v[c] for c in e}
    levels = sorted(set(residual.values()))
    rank = {r: i for i, r in enumerate(levels)}
    return {c: rank[r] for c, r in residual.items()}


def key_fields(cls: SchedulerClass, n: int, ctx: "RunContext") -> list[int]:
    model = ctx.model
    state = ctx.state
    fields = [cls.tag, n, model.location_index[state.location]]
    if cls.history:
        fields.append(ctx.trace.digest)
    if cls.timing is Timing.VALUES:
        fields.extend(discretise(state.values[c], n) for c in model.clocks)
    elif cls.timing is Timing.GLOBAL_TIME:
        fields.append(discretise(ctx.elapsed, n))
    if cls.future is Future.EXPIRATIONS:
        fields.extend(discretise(state.expirations[c], n) for c in model.clocks)
    elif cls.future is Future.ORDER:
        ranks = expiration_order(state.values, state.expirations)
        fields.extend(ranks[c] for c in model.clocks)
    return fields


def pack(fields) -> bytes:
    return struct.pack(f"<{len(fields)}Q", *fields)


def project(cls: SchedulerClass, n: int, ctx: "RunContext") -> bytes:
    return pack(key_fields(cls, n, ctx))


def encode_label(label: "StepLabel", n: int) -> bytes:
    from .semantics import Delay

    if isinstance(label, Delay):
        return pack((1, discretise(label.duration, n)))
    return pack((0, label.index))


def extend_trace(trace: ObservationTrace, cls: SchedulerClass, n: int,
                 pre_state_key: bytes, label: "StepLabel") -> ObservationTrace:
    if not cls.history:
        return ObservationTrace(trace.digest, trace.steps + 1)
    digest = fnv1a64(pre_state_key + encode_label(label, n), trace.digest)
    return ObservationTrace(digest, trace.steps + 1)
