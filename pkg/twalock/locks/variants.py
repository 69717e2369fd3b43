"""
Variants of the ticket and TWA locks.

- TktDualLock keeps a second, long-term grant field in its own sector.
- TwaIdLock parks long-term waiters on thread identities instead of counters.
- ThreeStageLock composes a FIFO ticket lock with two test-and-set locks so
  that at most one thread waits on each of the inner stages.
"""

import threading

from config import Config
from twalock.bucket.messages import messages
from twalock.errors import ConfigurationError
from twalock.locks.base import SpinLock
from twalock.locks.memory import AtomicWord, Sector, SectorBlock, cpu_relax
from twalock.locks.tas import TasLock
from twalock.locks.ticket import MASK32, TicketLock
from twalock.locks.twa import WaitingArray, check_threshold, default_waiting_array


HALF32: int = 1 << 31


class TktDualLock(SpinLock):
    """Ticket lock with separate short-term and long-term grant fields.

    ``grant_long`` is an admission horizon: tickets up to it may spin on
    ``grant_short``. Release publishes ``grant_short + threshold`` there, and
    waiters always confirm ownership against ``grant_short``.
    """

    kind = "tktdual"
    fifo = True

    def __init__(self, storage: Sector = None, *, threshold: int = Config.LONG_TERM_THRESHOLD):
        super().__init__()
        if threshold < 1:
            raise ConfigurationError(messages.get("locks", "BAD_THRESHOLD", threshold, "unbounded"))

        grants = self._own(SectorBlock(4))
        if storage is None:
            storage = grants.sector(2)
        self.storage = storage
        self.identity = storage.address
        self.threshold = threshold
        self._ticket: AtomicWord = storage.word(0, 4)
        self._grant_short: AtomicWord = grants.sector(0).word(0, 4)
        self._grant_long: AtomicWord = grants.sector(1).word(0, 4)
        self._grant_long.store(threshold)
        # Debug gauge of threads spinning on grant_short
        self._short_spinners: AtomicWord = grants.sector(3).word(0, 4)
        self.peak_short_spinners = 0

    @property
    def ticket(self) -> int:
        return self._ticket.load()

    @property
    def grant_short(self) -> int:
        return self._grant_short.load()

    @property
    def grant_long(self) -> int:
        return self._grant_long.load()

    def locked(self) -> bool:
        return self.ticket != self.grant_short

    def acquire(self) -> int:
        tx = self._ticket.fetch_inc()

        if (tx - self._grant_short.load()) & MASK32 > self.threshold:
            # Wait until the horizon reaches tx, i.e. grant_long >= tx modulo wrap
            while (self._grant_long.load() - tx) & MASK32 >= HALF32:
                cpu_relax()

        if self._grant_short.load() != tx:
            self._spin_short(tx)

        self._mark_held()

        return tx

    def _spin_short(self, tx: int) -> None:
        if __debug__:
            spinners = self._short_spinners.fetch_inc() + 1
            self.peak_short_spinners = max(self.peak_short_spinners, spinners)
            # One extra spinner is possible while the new owner has yet to notice
            assert spinners <= self.threshold + 1, messages.get("locks", "SHORT_SPINNERS", spinners, self.threshold + 1)

        while self._grant_short.load() != tx:
            cpu_relax()

        if __debug__:
            self._short_spinners.fetch_add(-1)

    def release(self) -> None:
        self._mark_released()
        k = (self._grant_short.load() + 1) & MASK32
        self._grant_short.store(k)
        self._grant_long.store((k + self.threshold) & MASK32)


_tokens_block = SectorBlock(1)
_token_counter: AtomicWord = _tokens_block.word(0, 8)
_tokens = threading.local()


def thread_token() -> int:
    """Process-unique nonzero identity of the calling thread, assigned on first use."""
    token = getattr(_tokens, "token", None)
    if token is None:
        token = _tokens.token = _token_counter.fetch_inc() + 1

    return token


class TwaIdLock(TicketLock):
    """TWA whose long-term waiters publish their identity in the waiting array.

    Release stores 0 into the slot instead of incrementing it, so the unlock
    path performs no atomic read-modify-write on the array.
    """

    kind = "twaid"
    fifo = True

    def __init__(
        self,
        storage: Sector = None,
        *,
        array: WaitingArray = None,
        threshold: int = Config.LONG_TERM_THRESHOLD,
        compact: bool = False,
    ):
        super().__init__(storage, compact=compact)
        self.array = array if array is not None else default_waiting_array("identities")
        check_threshold(threshold, self.array.length)
        self.threshold = threshold

    def acquire(self) -> int:
        word = self._word
        tx = word.take_ticket()
        dx = (tx - word.load_grant()) & self._mask

        if dx == 0:
            self._mark_held()
            return tx

        if dx > self.threshold:
            self._wait_long_term(tx)

        while word.load_grant() != tx:
            cpu_relax()

        self._mark_held()

        return tx

    def _wait_long_term(self, tx: int) -> None:
        word = self._word
        me = thread_token()
        slot = self.array.slot(self.array.hash(self.identity, tx))

        while True:
            slot.store(me)
            if (tx - word.load_grant()) & self._mask <= self.threshold:
                return

            # Cleared by a release or overwritten by a colliding waiter
            while slot.load() == me:
                cpu_relax()

            if (tx - word.load_grant()) & self._mask <= self.threshold:
                return

    def release(self) -> None:
        self._mark_released()
        k = self._advance_grant()
        at = self.array.hash(self.identity, (k + self.threshold) & self._mask)
        self.array.slot(at).store(0)


class ThreeStageLock(SpinLock):
    """Composite mutex: acquire A; acquire B; release A; acquire C; release B.

    A is a FIFO ticket lock, B and C are test-and-set locks. Whoever holds C
    holds the composite. Since only the holder of A contends for B and only
    the holder of B contends for C, both are claimed without atomics unless
    the fast path lets arrivals try C directly.
    """

    kind = "threestage"

    def __init__(self, storage: Sector = None, *, fast_path: bool = False, compact: bool = False):
        super().__init__()
        inner = self._own(SectorBlock(3))
        if storage is None:
            storage = inner.sector(0)
        self.storage = storage
        self.identity = storage.address
        self.fast_path = fast_path
        self.a = TicketLock(storage, compact=compact)
        self.b = TasLock(inner.sector(1))
        self.c = TasLock(inner.sector(2))

    @property
    def fifo(self) -> bool:
        return not self.fast_path

    def locked(self) -> bool:
        return self.c.locked()

    def acquire(self):
        """Returns the ticket drawn from A, or None when the fast path won."""
        if self.fast_path and self.c.try_acquire():
            return None

        tx = self.a.acquire()
        self.b.claim()
        self.a.release()

        if self.fast_path:
            self.c.acquire()
        else:
            self.c.claim()

        self.b.release()

        return tx

    def release(self) -> None:
        self.c.release()
