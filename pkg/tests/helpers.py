import threading
import time
from collections import Counter

from twalock.locks.twa import WaitingArray


WATCHDOG: float = 60.0


class Spy:
    """Forwards to ``inner`` and counts method calls per name and per thread."""

    def __init__(self, inner, log: list = None):
        self._inner = inner
        self._log = log
        self.calls = Counter()
        self.by_thread = {}

    def __getattr__(self, name):
        attr = getattr(self._inner, name)
        if not callable(attr):
            return attr

        def wrapped(*args, **kwargs):
            thread = threading.current_thread().name
            self.calls[name] += 1
            self.by_thread.setdefault(thread, Counter())[name] += 1
            result = attr(*args, **kwargs)
            if self._log is not None:
                self._log.append((thread, name, args, result))
            return result

        return wrapped


class RecordingArray(WaitingArray):
    """Waiting array that logs notifications and slot loads."""

    def __init__(self, length: int = 4096, events: list = None):
        super().__init__(length)
        self.events = events if events is not None else []
        self.loads = []

    def load(self, index):
        self.loads.append((threading.current_thread().name, index))
        return super().load(index)

    def notify(self, identity, ticket):
        index = self.hash(identity, ticket)
        before = self.slot(index).load()
        super().notify(identity, ticket)
        self.events.append(("notify", ticket, index, before))


class SpyArray(WaitingArray):
    """Waiting array whose slot words are wrapped in spies."""

    def __init__(self, length: int = 4096):
        super().__init__(length)
        self.spies = {}

    def slot(self, index):
        spy = self.spies.get(index)
        if spy is None:
            spy = self.spies[index] = Spy(super().slot(index))
        return spy

    def calls(self) -> Counter:
        total = Counter()
        for spy in self.spies.values():
            total.update(spy.calls)
        return total


class Crew:
    """Worker threads whose failures surface in the test thread."""

    def __init__(self):
        self.threads = []
        self.errors = []

    def start(self, target, *args, name: str = None) -> threading.Thread:
        def body():
            try:
                target(*args)
            except BaseException as e:
                self.errors.append(e)

        thread = threading.Thread(target=body, name=name, daemon=True)
        thread.start()
        self.threads.append(thread)

        return thread

    def join(self, timeout: float = WATCHDOG) -> None:
        deadline = time.monotonic() + timeout
        for thread in self.threads:
            thread.join(max(0.0, deadline - time.monotonic()))

        alive = [t.name for t in self.threads if t.is_alive()]
        assert not alive, f"still running after {timeout}s: {alive}"

        if self.errors:
            raise self.errors[0]


def wait_until(predicate, timeout: float = 10.0) -> bool:
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        if predicate():
            return True
        time.sleep(0.001)

    return predicate()


class OrderedTail:
    """MCS tail wrapper recording which thread enqueued, in exchange order.

    The exchange and the append happen under ``order_lock`` so the log
    matches the order in which nodes joined the queue.
    """

    def __init__(self, inner, enqueued: list, order_lock: threading.Lock = None):
        self._inner = inner
        self._enqueued = enqueued
        self._order_lock = order_lock or threading.Lock()

    def __getattr__(self, name):
        return getattr(self._inner, name)

    def exchange(self, value):
        with self._order_lock:
            self._enqueued.append(threading.current_thread().name)
            return self._inner.exchange(value)
