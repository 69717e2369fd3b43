"""
TWA: a ticket lock whose long-term waiters park on a shared waiting array.

Only waiters within ``threshold`` of the head spin on ``grant``; everyone
further back spins on a slot of the waiting array chosen by hashing the lock
identity with the waiter's ticket. Release advances ``grant`` first and only
then bumps the slot belonging to ticket ``grant + threshold``, promoting that
waiter to short-term waiting. Slot values mean nothing beyond "something
changed, recheck grant", so hash collisions only cost spurious rechecks.
"""

import math
import threading

from config import Config
from twalock import LOGGER
from twalock.bucket.messages import messages
from twalock.errors import ConfigurationError
from twalock.locks.memory import SECTOR_SIZE, AtomicWord, Sector, SectorBlock, cpu_relax
from twalock.locks.ticket import TicketLock
from twalock.others.help import humanbytes


SLOT_WIDTH: int = 8


def is_power_of_two(value: int) -> bool:
    return value >= 1 and value & (value - 1) == 0


def next_power_of_two(value: int) -> int:
    return 1 << max(value - 1, 0).bit_length()


class WaitingArray:
    """Fixed table of 64-bit notification counters shared by TWA locks."""

    def __init__(self, length: int = Config.WAIT_ARRAY_SIZE, multiplier: int = Config.WAIT_HASH_MULTIPLIER):
        if not is_power_of_two(length):
            raise ConfigurationError(messages.get("locks", "ARRAY_NOT_POW2", length))

        self.length = length
        self.mask = length - 1
        self.multiplier = multiplier
        self._block = SectorBlock(math.ceil(length * SLOT_WIDTH / SECTOR_SIZE))
        self.address = self._block.address
        # Views are mapped on first touch; a racing duplicate is harmless
        self._slots: list = [None] * length

    @staticmethod
    def length_for_cpus(cpus: int = None) -> int:
        cpus = cpus or Config.HW_THREADS

        return max(Config.WAIT_ARRAY_SIZE, next_power_of_two(cpus * Config.WAIT_SLOTS_PER_CPU))

    @classmethod
    def for_cpus(cls, cpus: int = None) -> "WaitingArray":
        """An array scaled to the machine, never smaller than the default."""
        length = cls.length_for_cpus(cpus)
        LOGGER.info(messages.get("locks", "ARRAY_SIZED", length, humanbytes(length * SLOT_WIDTH), cpus or Config.HW_THREADS))

        return cls(length)

    def hash(self, identity: int, ticket: int) -> int:
        return ((ticket * self.multiplier) ^ identity) & self.mask

    def slot(self, index: int) -> AtomicWord:
        word = self._slots[index]
        if word is None:
            word = self._slots[index] = self._block.word(index * SLOT_WIDTH, SLOT_WIDTH)

        return word

    def load(self, index: int) -> int:
        return self.slot(index).load()

    def notify(self, identity: int, ticket: int) -> None:
        # Atomic: distinct (lock, ticket) pairs may share the slot
        self.slot(self.hash(identity, ticket)).fetch_inc()

    def snapshot(self) -> list[int]:
        return [self.load(i) for i in range(self.length)]

    def close(self) -> None:
        self._block.close()

    def __len__(self):
        return self.length

    def __repr__(self):
        return f"<WaitingArray length={self.length} at {self.address:#x}>"


_default_arrays: dict[str, WaitingArray] = {}
_default_arrays_lock = threading.Lock()


def default_waiting_array(purpose: str = "counters") -> WaitingArray:
    """The process-wide array every TWA lock notifies unless given its own.

    Counter slots and identity slots follow different update rules, so each
    purpose gets its own table.
    """
    array = _default_arrays.get(purpose)

    if array is None:
        with _default_arrays_lock:
            array = _default_arrays.get(purpose)
            if array is None:
                array = _default_arrays[purpose] = WaitingArray()
                LOGGER.debug(f"mapped default {purpose} waiting array at {array.address:#x}")

    return array


def check_threshold(threshold: int, array_length: int) -> None:
    # A single-slot array is legal; every ticket collides on it
    if threshold < 1 or (array_length > 1 and threshold >= array_length):
        raise ConfigurationError(messages.get("locks", "BAD_THRESHOLD", threshold, array_length))


class TwaLock(TicketLock):
    kind = "twa"
    fifo = True

    def __init__(
        self,
        storage: Sector = None,
        *,
        array: WaitingArray = None,
        threshold: int = Config.LONG_TERM_THRESHOLD,
        compact: bool = False,
        atomic_release: bool = False,
    ):
        super().__init__(storage, compact=compact, atomic_release=atomic_release)
        self.array = array if array is not None else default_waiting_array()
        check_threshold(threshold, self.array.length)
        self.threshold = threshold
        # Exits from long-term waiting; debug only, not updated atomically
        self.promotions = 0

    def acquire(self) -> int:
        word = self._word
        tx = word.take_ticket()
        grant = word.load_grant()
        dx = (tx - grant) & self._mask

        if dx == 0:
            self._mark_held()
            return tx

        if dx > self.threshold:
            self._wait_long_term(tx, grant)

        while word.load_grant() != tx:
            cpu_relax()

        self._mark_held()

        return tx

    def _wait_long_term(self, tx: int, grant: int) -> None:
        word = self._word
        array = self.array
        at = array.hash(self.identity, tx)

        while True:
            u = array.load(at)
            observed = word.load_grant()

            # Recheck: a release may have slipped in before we read the slot
            if observed == grant:
                while array.load(at) == u:
                    cpu_relax()
                observed = word.load_grant()

            grant = observed
            dx = (tx - grant) & self._mask

            if dx <= self.threshold:
                break

        if __debug__:
            # Short-term gate: only tickets within threshold of the head spin on grant
            gap = (tx - word.load_grant()) & self._mask
            assert gap <= self.threshold, messages.get("locks", "SHORT_TERM_GATE", tx, gap, self.threshold)
            self.promotions += 1

    def release(self) -> None:
        self._mark_released()
        k = self._advance_grant()
        # Handover is done; the notification is outside the critical path
        self.array.notify(self.identity, (k + self.threshold) & self._mask)
