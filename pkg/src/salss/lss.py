"""Lightweight schedulers: a 32-bit id plus a class and discretisation factor.

A decision hashes the id together with the observation key and takes the
first splitmix64 output as a uniform choice among the enabled transitions.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass

from .errors import ContractViolation
from .observe import SchedulerClass
from .rng import SplitMix64, fnv1a64, splitmix64_first, unit_double

_ID = struct.Struct("<I")


@dataclass(frozen=True)
class LssScheduler:
    id: int
    cls: SchedulerClass
    n: int = 1

    def __post_init__(self):
        if not 0 <= self.id <= 0xFFFFFFFF:
            raise ValueError(f"scheduler id {self.id} is not a 32-bit unsigned integer")
        if self.n < 1:
            raise ValueError("discretisation factor must be >= 1")


def decision_seed(scheduler_id: int, key: bytes) -> int:
    return fnv1a64(_ID.pack(scheduler_id) + key)


def decide(sched: LssScheduler | int, key: bytes, k: int) -> int:
    """Index in [0, k) of the transition the scheduler takes given observation ``key``."""
    if k < 1:
        raise ContractViolation("decide needs at least one enabled transition")
    sid = sched if isinstance(sched, int) else sched.id
    w = splitmix64_first(decision_seed(sid, key))
    return min(math.floor(unit_double(w) * k), k - 1)


def sample_ids(m: int, master_seed: int) -> list[int]:
    """``m`` distinct scheduler ids drawn from the master stream."""
    if m < 1:
        raise ValueError("need at least one scheduler")
    if m > 1 << 32:
        raise ValueError("cannot draw more than 2**32 distinct ids")
    rng = SplitMix64(master_seed)
    seen: set[int] = set()
    out: list[int] = []
    while len(out) < m:
        sid = rng.next_u64() >> 32
        if sid not in seen:
            seen.add(sid)
            out.append(sid)
    return out
