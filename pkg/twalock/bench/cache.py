"""
Random-replacement cache fixture and the per-thread key generator feeding it.

The cache is not thread safe; the benchmark serializes every access through
the lock under test.
"""

from config import Config
from twalock.bench.prng import MASK32, Mt19937


def fmix32(key: int) -> int:
    """The murmur3 32-bit finalizer, used as the cached value of a key."""
    h = key & MASK32
    h ^= h >> 16
    h = (h * 0x85EBCA6B) & MASK32
    h ^= h >> 13
    h = (h * 0xC2B2AE35) & MASK32
    h ^= h >> 16

    return h


class RandomCache:
    """Key to value map that evicts a uniformly random resident when full.

    Entry storage is allocated up front so inserts never grow anything.
    """

    def __init__(self, capacity: int = Config.CACHE_CAPACITY, seed: int = Config.DEFAULT_SEED, trace: list = None):
        self.capacity = capacity
        self.size = 0
        self.hits = 0
        self.misses = 0
        self.evictions = 0
        self.trace = trace
        self._rng = Mt19937(seed)
        self._keys: list[int] = [0] * capacity
        self._values: list[int] = [0] * capacity
        self._index: dict[int, int] = {}

    def __len__(self):
        return self.size

    def __contains__(self, key):
        return key in self._index

    def access(self, key: int) -> int:
        i = self._index.get(key)

        if i is not None:
            self.hits += 1
            if self.trace is not None:
                self.trace.append(True)
            return self._values[i]

        self.misses += 1
        if self.trace is not None:
            self.trace.append(False)

        if self.size == self.capacity:
            self._evict()

        value = fmix32(key)
        i = self.size
        self._keys[i] = key
        self._values[i] = value
        self._index[key] = i
        self.size += 1

        assert self.size <= self.capacity, f"cache holds {self.size} entries, capacity {self.capacity}"

        return value

    def _evict(self) -> None:
        victim = self._rng.uniform(self.size)
        del self._index[self._keys[victim]]

        # Move the last resident into the hole
        last = self.size - 1
        if victim != last:
            self._keys[victim] = self._keys[last]
            self._values[victim] = self._values[last]
            self._index[self._keys[victim]] = victim

        self.size = last
        self.evictions += 1


class Keyset:
    """A thread's small working set of recently used keys."""

    def __init__(
        self,
        prng: Mt19937,
        size: int = Config.KEYSET_SIZE,
        key_space: int = Config.CACHE_KEY_SPACE,
        reuse_p: float = Config.KEY_REUSE_P,
    ):
        self.prng = prng
        self.key_space = key_space
        self.reuse_p = reuse_p
        # Selection with replacement
        self.keys = [prng.uniform(key_space) for _ in range(size)]

    def next_key(self) -> int:
        prng = self.prng

        if prng.random() < self.reuse_p:
            return self.keys[prng.uniform(len(self.keys))]

        key = prng.uniform(self.key_space)
        self.keys[prng.uniform(len(self.keys))] = key

        return key
