from twalock.locks.base import SpinLock
from twalock.locks.memory import AtomicWord, Sector, SectorBlock, cpu_relax


FREE: int = 0
HELD: int = 1


class TasLock(SpinLock):
    """Test-and-set lock on a single word: 0 free, 1 held. Not FIFO."""

    kind = "tas"
    fifo = False

    def __init__(self, storage: Sector = None):
        super().__init__()
        if storage is None:
            storage = self._own(SectorBlock(1)).sector(0)
        self.storage = storage
        self.identity = storage.address
        self._state: AtomicWord = storage.word(0, 4)

    @property
    def state(self) -> int:
        return self._state.load()

    def locked(self) -> bool:
        return self._state.load() == HELD

    def try_acquire(self) -> bool:
        if self._state.exchange(HELD) == FREE:
            self._mark_held()
            return True

        return False

    def acquire(self) -> None:
        while not self.try_acquire():
            cpu_relax()

    def claim(self) -> None:
        """Acquire with a plain load and store.

        Only correct while the caller is the sole thread that can be
        acquiring this lock, e.g. because another lock guards the attempt.
        """
        while self._state.load() != FREE:
            cpu_relax()

        self._state.store(HELD)
        self._mark_held()

    def release(self) -> None:
        self._mark_released()
        self._state.store(FREE)
