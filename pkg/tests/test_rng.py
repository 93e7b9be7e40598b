import struct

from hypothesis import given, strategies as st

from salss.rng import FNV_OFFSET, SplitMix64, fnv1a64, mix64, run_seed, splitmix64_first, unit_double


def test_fnv_reference_vectors():
    # published FNV-1a 64 test vectors
    assert fnv1a64(b"") == 0xCBF29CE484222325
    assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a64(b"foobar") == 0x85944171F73967E8


def test_fnv_is_incremental():
    assert fnv1a64(b"bar", fnv1a64(b"foo")) == fnv1a64(b"foobar")
    assert fnv1a64(b"", 123) == 123 and FNV_OFFSET == 14695981039346656037


def test_splitmix_reference_sequence():
    # first outputs of splitmix64 seeded with 0 (reference implementation by S. Vigna)
    g = SplitMix64(0)
    assert [g.next_u64() for _ in range(3)] == [
        0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]
    assert splitmix64_first(0) == 0xE220A8397B1DCDAF


@given(st.integers(0, 2**64 - 1))
def test_unit_double_range(w):
    u = unit_double(w)
    assert 0.0 <= u < 1.0


@given(st.integers(0, 2**64 - 1))
def test_stream_matches_first(seed):
    assert SplitMix64(seed).next_u64() == splitmix64_first(seed)
    assert 0 <= mix64(seed) < 2**64


def test_run_seed_layout():
    assert run_seed(5, 7, 9) == fnv1a64(struct.pack("<QIQ", 5, 7, 9))
    assert run_seed(5, 7, 9) != run_seed(5, 7, 10) != run_seed(5, 8, 9)
