"""FNV-1a hashing and the splitmix64 generator.

Both are fixed for bit-exactness: the compiled kernel reimplements exactly
these operations and the test suite checks the two against each other.
"""
import struct

MASK64 = (1 << 64) - 1
FNV_OFFSET = 14695981039346656037
FNV_PRIME = 1099511628211
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
UNIT = 2.0 ** -53

_RUN_SEED = struct.Struct("<QIQ")


def fnv1a64(data: bytes, h: int = FNV_OFFSET) -> int:
    """FNV-1a over ``data``, continuing from state ``h``."""
    for b in data:
        h = ((h ^ b) * FNV_PRIME) & MASK64
    return h


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def splitmix64_first(seed: int) -> int:
    """First output of a splitmix64 stream seeded with ``seed``."""
    return mix64((seed + GOLDEN_GAMMA) & MASK64)


def unit_double(w: int) -> float:
    """Map a 64-bit word to [0, 1) using its top 53 bits."""
    return (w >> 11) * UNIT


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)

    def random(self) -> float:
        return (self.next_u64() >> 11) * UNIT

    def __repr__(self) -> str:
        return f"SplitMix64(state={self.state:#018x})"


def run_seed(master_seed: int, scheduler_id: int, run_index: int) -> int:
    """Seed of the private stream for one simulation run."""
    return fnv1a64(_RUN_SEED.pack(master_seed & MASK64, scheduler_id & 0xFFFFFFFF, run_index))


def run_stream(master_seed: int, scheduler_id: int, run_index: int) -> SplitMix64:
    return SplitMix64(run_seed(master_seed, scheduler_id, run_index))
