import threading
import time

import pytest

from helpers import Spy, SpyArray, wait_until
from twalock.errors import ConfigurationError
from twalock.locks.twa import WaitingArray
from twalock.locks.variants import ThreeStageLock, TktDualLock, TwaIdLock, thread_token


# --- TKT-Dual ---


def test_tktdual_uncontended_behaves_like_ticket():
    lock = TktDualLock()

    assert lock.acquire() == 0
    assert lock._short_spinners.load() == 0
    lock.release()

    assert (lock.ticket, lock.grant_short, lock.grant_long) == (1, 1, 2)
    assert not lock.locked()


def test_tktdual_grants_live_in_separate_sectors():
    lock = TktDualLock()
    addresses = {lock._ticket.address, lock._grant_short.address, lock._grant_long.address}

    assert len({a // 128 for a in addresses}) == 3


def test_tktdual_rejects_zero_threshold():
    with pytest.raises(ConfigurationError):
        TktDualLock(threshold=0)


def test_tktdual_short_spinners_and_order(crew):
    lock = TktDualLock(threshold=1)
    stop = threading.Event()
    admitted, samples = [], []

    def worker():
        for _ in range(150):
            admitted.append(lock.acquire())
            lock.release()

    def sampler():
        while not stop.is_set():
            samples.append((lock.grant_short, lock.grant_long))
            time.sleep(0)

    watcher = threading.Thread(target=sampler, daemon=True)
    watcher.start()
    for _ in range(4):
        crew.start(worker)
    crew.join()
    stop.set()
    watcher.join()

    assert admitted == list(range(600))
    assert lock.peak_short_spinners <= 2
    assert all(short <= long for short, long in samples)


def test_tktdual_long_term_waiter_is_promoted(crew):
    lock = TktDualLock(threshold=1)
    admitted = []

    def waiter():
        admitted.append(lock.acquire())
        lock.release()

    lock.acquire()
    for _ in range(3):
        crew.start(waiter)
    assert wait_until(lambda: lock.ticket == 4)
    # Only ticket 1 is inside the horizon
    assert lock.grant_long == 1

    lock.release()
    crew.join()

    assert admitted == [1, 2, 3]


# --- TWA-ID ---


def test_thread_tokens_are_unique_and_nonzero(crew):
    tokens = []

    for _ in range(4):
        crew.start(lambda: tokens.append((thread_token(), thread_token())))
    crew.join()

    assert all(a == b != 0 for a, b in tokens)
    assert len({a for a, _ in tokens}) == 4
    assert thread_token() not in {a for a, _ in tokens}


def test_twaid_release_is_a_plain_store():
    array = SpyArray(4096)
    lock = TwaIdLock(array=array)
    lock.acquire()
    lock.release()

    calls = array.calls()
    assert calls["store"] == 1
    assert calls["fetch_inc"] == calls["fetch_add"] == calls["exchange"] == calls["cas"] == 0


def test_twaid_lone_long_term_waiter(crew):
    array = WaitingArray(4096)
    lock = TwaIdLock(array=array, threshold=1)
    at = array.hash(lock.identity, 2)
    admitted = []

    def waiter():
        admitted.append(lock.acquire())
        lock.release()

    lock.acquire()
    crew.start(waiter)
    assert wait_until(lambda: lock.ticket == 2)
    crew.start(waiter)
    # The third arrival publishes its identity in its slot
    assert wait_until(lambda: array.load(at) != 0)

    lock.release()
    crew.join()

    assert admitted == [1, 2]
    assert array.load(at) == 0


@pytest.mark.parametrize("length", [1, 2, 4096])
def test_twaid_terminates_with_colliding_waiters(crew, length):
    lock = TwaIdLock(array=WaitingArray(length), threshold=1)
    admitted = []

    def worker():
        for _ in range(200):
            admitted.append(lock.acquire())
            lock.release()

    for _ in range(6):
        crew.start(worker)
    crew.join()

    assert admitted == list(range(1200))


# --- 3-Stage ---


def test_threestage_fast_path_touches_only_c():
    lock = ThreeStageLock(fast_path=True)
    lock.a = Spy(lock.a)
    lock.b = Spy(lock.b)

    assert lock.acquire() is None
    assert lock.locked()
    lock.release()

    assert not lock.a.calls and not lock.b.calls
    assert not lock.locked()


def test_threestage_slow_path_order():
    lock = ThreeStageLock()
    log = []
    lock.a = Spy(lock.a, log)
    lock.b = Spy(lock.b, log)
    lock.c = Spy(lock.c, log)

    assert lock.acquire() == 0
    lock.release()

    assert [name for _, name, _, _ in log] == ["acquire", "claim", "release", "claim", "release", "release"]
    assert lock.a.calls == {"acquire": 1, "release": 1}
    assert lock.b.calls == {"claim": 1, "release": 1}
    assert lock.c.calls == {"claim": 1, "release": 1}


def test_threestage_waiters_spread_over_stages(crew):
    lock = ThreeStageLock()
    admitted = []

    def waiter():
        admitted.append(lock.acquire())
        lock.release()

    lock.acquire()
    for _ in range(4):
        crew.start(waiter)

    # One waiter on C, one holding A while it waits on B, two queued on A
    assert wait_until(lambda: lock.a.ticket == 5 and lock.a.grant == 2 and lock.b.locked())
    assert lock.a.waiters == 2
    assert lock.c.locked()

    lock.release()
    crew.join()

    assert admitted == [1, 2, 3, 4]


@pytest.mark.parametrize("fast_path", [False, True])
def test_threestage_counter(crew, fast_path):
    lock = ThreeStageLock(fast_path=fast_path)
    counter = [0]

    def worker():
        for _ in range(300):
            lock.acquire()
            counter[0] += 1
            lock.release()

    for _ in range(4):
        crew.start(worker)
    crew.join()

    assert counter[0] == 1200
    assert not lock.locked()


def test_tktdual_spinner_gauge_is_checked():
    lock = TktDualLock(threshold=1)
    lock._short_spinners.store(2)

    with pytest.raises(AssertionError, match="3 threads spinning on grant_short, at most 2"):
        lock._spin_short(1)
