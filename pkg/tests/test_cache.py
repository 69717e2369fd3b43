import pytest

from twalock.bench.cache import Keyset, RandomCache, fmix32
from twalock.bench.prng import Mt19937


def test_fmix32_fixed_point_and_spread():
    assert fmix32(0) == 0
    assert len({fmix32(k) for k in range(1, 1000)}) == 999


def test_miss_then_hit():
    cache = RandomCache(capacity=4)

    assert cache.access(17) == fmix32(17)
    assert cache.access(17) == fmix32(17)
    assert (cache.hits, cache.misses) == (1, 1)
    assert 17 in cache


def test_capacity_is_never_exceeded():
    cache = RandomCache(capacity=10)

    for key in range(1000):
        assert cache.access(key) == fmix32(key)
        assert len(cache) <= 10

    assert len(cache) == 10
    assert cache.evictions == 990
    assert cache.misses == 1000


def test_eviction_keeps_index_consistent():
    cache = RandomCache(capacity=8, seed=99)
    prng = Mt19937(1)

    for _ in range(5000):
        key = prng.uniform(40)
        assert cache.access(key) == fmix32(key)

    resident = cache._keys[: len(cache)]
    assert sorted(resident) == sorted(cache._index)
    assert all(cache._keys[i] == k for k, i in cache._index.items())


def test_trace_is_deterministic():
    def run():
        trace = []
        cache = RandomCache(capacity=100, seed=5, trace=trace)
        keys = Keyset(Mt19937(8), size=10, key_space=500, reuse_p=0.9)
        for _ in range(3000):
            cache.access(keys.next_key())
        return trace

    first = run()
    assert first == run()
    assert len(first) == 3000
    assert any(first) and not all(first)


def test_full_reuse_stays_in_the_initial_keyset():
    keys = Keyset(Mt19937(2), size=10, key_space=50_000, reuse_p=1.0)
    initial = set(keys.keys)

    assert {keys.next_key() for _ in range(500)} <= initial
    assert set(keys.keys) == initial


def test_no_reuse_replaces_keyset_members():
    keys = Keyset(Mt19937(2), size=10, key_space=50_000, reuse_p=0.0)
    drawn = [keys.next_key() for _ in range(200)]

    assert all(0 <= k < 50_000 for k in drawn)
    assert set(keys.keys) <= set(drawn)


@pytest.mark.parametrize("reuse_p", [0.0, 0.5, 0.9])
def test_reuse_raises_hit_rate(reuse_p):
    cache = RandomCache(capacity=1000, seed=1)
    keys = Keyset(Mt19937(4), reuse_p=reuse_p)
    for _ in range(2000):
        cache.access(keys.next_key())

    if reuse_p == 0.0:
        assert cache.hits < 200
    else:
        assert cache.hits > 2000 * reuse_p * 0.8
