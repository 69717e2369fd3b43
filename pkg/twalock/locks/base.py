import threading
from abc import ABC, abstractmethod

from twalock.bucket.messages import messages


class SpinLock(ABC):
    """Common surface of every busy-waiting lock in the package.

    Acquire and release are unscoped: release takes no context from the
    matching acquire, so a lock can be handed between arbitrary call sites
    of the same thread. ``with lock:`` is offered as a convenience.
    """

    kind: str = "spin"
    fifo: bool = False

    def __init__(self):
        self._holder = None
        self._blocks = []

    @abstractmethod
    def acquire(self):
        ...

    @abstractmethod
    def release(self) -> None:
        ...

    @abstractmethod
    def locked(self) -> bool:
        ...

    def _own(self, block):
        self._blocks.append(block)
        return block

    def _mark_held(self) -> None:
        if __debug__:
            self._holder = threading.get_ident()

    def _mark_released(self) -> None:
        # Must run before the store that hands the lock over
        if __debug__:
            assert self._holder == threading.get_ident(), messages.get(
                "locks", "NOT_HOLDER", self.kind, threading.get_ident(), self._holder
            )
            self._holder = None

    def close(self) -> None:
        for block in self._blocks:
            block.close()
        self._blocks.clear()

    def __enter__(self):
        self.acquire()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.release()
        return False

    def __repr__(self):
        return f"<{type(self).__name__} locked={self.locked()}>"
