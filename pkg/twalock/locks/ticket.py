"""
Classic ticket lock.

``ticket`` dispenses positions in an implicit FIFO queue and ``grant`` names
the position currently admitted. Both live in the first bytes of a single
sector, either as two 32-bit words or, in compact mode, packed as two 16-bit
halves of one 32-bit word.
"""

import sys

from twalock.bucket.messages import messages
from twalock.locks.base import SpinLock
from twalock.locks.memory import AtomicWord, Sector, SectorBlock, cpu_relax


MASK32: int = 0xFFFFFFFF
MASK16: int = 0xFFFF


class WideLockWord:
    """ticket at offset 0, grant at offset 4, both unsigned 32-bit."""

    mask = MASK32

    def __init__(self, sector: Sector):
        self.ticket: AtomicWord = sector.word(0, 4)
        self.grant: AtomicWord = sector.word(4, 4)

    def take_ticket(self) -> int:
        return self.ticket.fetch_inc()

    def load_ticket(self) -> int:
        return self.ticket.load()

    def load_grant(self) -> int:
        return self.grant.load()

    def store_grant(self, value: int) -> None:
        self.grant.store(value & MASK32)

    def add_grant(self) -> int:
        return (self.grant.fetch_inc() + 1) & MASK32


class CompactLockWord:
    """Both counters in one 32-bit word: ticket high half, grant low half."""

    mask = MASK16

    def __init__(self, sector: Sector):
        self.word: AtomicWord = sector.word(0, 4)
        # The grant half is written on its own so release never disturbs ticket
        self.grant: AtomicWord = sector.word(0 if sys.byteorder == "little" else 2, 2)

    def take_ticket(self) -> int:
        return (self.word.fetch_add(1 << 16) >> 16) & MASK16

    def load_ticket(self) -> int:
        return (self.word.load() >> 16) & MASK16

    def load_grant(self) -> int:
        return self.grant.load()

    def store_grant(self, value: int) -> None:
        self.grant.store(value & MASK16)

    def add_grant(self) -> int:
        return (self.grant.fetch_inc() + 1) & MASK16


def lock_word(sector: Sector, compact: bool = False):
    return CompactLockWord(sector) if compact else WideLockWord(sector)


class TicketLock(SpinLock):
    kind = "ticket"
    fifo = True

    def __init__(self, storage: Sector = None, *, compact: bool = False, atomic_release: bool = False):
        """
        :param storage: Sector to place the lock word in; a private one is mapped when omitted.
        :param compact: Pack ticket and grant as 16-bit halves of one word.
        :param atomic_release: Advance grant with fetch-and-add instead of load-increment-store.
        """
        super().__init__()
        if storage is None:
            storage = self._own(SectorBlock(1)).sector(0)
        self.storage = storage
        self.identity = storage.address
        self.compact = compact
        self.atomic_release = atomic_release
        self._word = lock_word(storage, compact)
        self._mask = self._word.mask

    @property
    def ticket(self) -> int:
        return self._word.load_ticket()

    @property
    def grant(self) -> int:
        return self._word.load_grant()

    @property
    def waiters(self) -> int:
        held = (self.ticket - self.grant) & self._mask

        return max(held - 1, 0)

    def locked(self) -> bool:
        return self.ticket != self.grant

    def acquire(self) -> int:
        word = self._word
        tx = word.take_ticket()

        if __debug__ and self.compact:
            assert (tx - word.load_grant()) & MASK16 < MASK16, messages.get("locks", "COMPACT_CAP", MASK16)

        while word.load_grant() != tx:
            cpu_relax()

        self._mark_held()

        return tx

    def _advance_grant(self) -> int:
        """Hand the lock to the next ticket and return the new grant value."""
        word = self._word

        if self.atomic_release:
            return word.add_grant()

        k = (word.load_grant() + 1) & self._mask
        word.store_grant(k)

        return k

    def release(self) -> None:
        self._mark_released()
        self._advance_grant()
