"""
32-bit Mersenne Twister.

Benchmarks express work as generator steps, so every worker owns one
instance seeded ``base + thread index``; instances are never shared.
"""

from config import Config


N: int = 624
M: int = 397
MATRIX_A: int = 0x9908B0DF
UPPER_MASK: int = 0x80000000
LOWER_MASK: int = 0x7FFFFFFF
MASK32: int = 0xFFFFFFFF


def temper(y: int) -> int:
    y ^= y >> 11
    y ^= (y << 7) & 0x9D2C5680
    y ^= (y << 15) & 0xEFC60000
    y ^= y >> 18

    return y


class Mt19937:
    def __init__(self, seed: int = Config.DEFAULT_SEED):
        self.seed = seed & MASK32
        self.index = N
        self.last = None
        mt = self._mt = [0] * N
        mt[0] = prev = self.seed
        for i in range(1, N):
            prev = mt[i] = (1812433253 * (prev ^ (prev >> 30)) + i) & MASK32

    def _twist(self) -> None:
        mt = self._mt
        for i in range(N):
            y = (mt[i] & UPPER_MASK) | (mt[(i + 1) % N] & LOWER_MASK)
            mt[i] = mt[(i + M) % N] ^ (y >> 1) ^ (MATRIX_A if y & 1 else 0)
        self.index = 0

    def next(self) -> int:
        if self.index >= N:
            self._twist()

        value = self.last = temper(self._mt[self.index])
        self.index += 1

        return value

    def advance(self, steps: int):
        """Consume exactly ``steps`` outputs and return the last one.

        With ``steps == 0`` the state is untouched and the previous output is returned.
        """
        if steps < 0:
            raise ValueError(f"cannot advance a generator by {steps} steps")

        for _ in range(steps):
            self.next()

        return self.last

    def uniform(self, bound: int) -> int:
        """One output scaled into ``[0, bound)``."""
        return (self.next() * bound) >> 32

    def random(self) -> float:
        return self.next() / 2**32

    @property
    def state(self) -> tuple:
        return self.index, tuple(self._mt)

    def __repr__(self):
        return f"Mt19937(seed={self.seed}, index={self.index})"
