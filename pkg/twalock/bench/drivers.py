"""
Benchmark drivers.

Each ``run_*`` function performs a single run of its benchmark and returns a
``BenchResult``; the CLI repeats runs and takes the median. Work is measured
in generator steps. Workers are released together through a barrier; timed
runs end when the main thread sets the stop event, fixed runs when every
worker has completed its own ``iterations``.

Lock-based drivers bump a plain, non-atomic shadow counter inside every
critical section. After the workers are joined the shadow must equal the
reported total; anything else means mutual exclusion failed.
"""

import contextlib
import hashlib
import threading
import time
from concurrent.futures import ThreadPoolExecutor

from config import Config
from twalock import LOGGER
from twalock.bench.cache import Keyset, RandomCache, fmix32
from twalock.bench.prng import Mt19937
from twalock.bench.spec import BenchResult, BenchSpec
from twalock.bucket.messages import messages
from twalock.errors import InvariantViolation
from twalock.locks.memory import SECTOR_SIZE, SectorBlock
from twalock.locks.registry import make_lock
from twalock.locks.ticket import MASK16, MASK32
from twalock.locks.twa import WaitingArray, default_waiting_array


# Kinds whose acquire returns the admitted ticket
FIFO_TICKET_KINDS: tuple[str, ...] = ("ticket", "twa", "tktdual", "twaid", "threestage")

_arrays: dict[tuple[str, int], WaitingArray] = {}
_arrays_lock = threading.Lock()


def waiting_array_for(kind: str, length: int) -> WaitingArray:
    """Shared array a lock kind should use for arrays of ``length`` slots."""
    purpose = "identities" if kind == "twaid" else "counters"

    if length == Config.WAIT_ARRAY_SIZE:
        return default_waiting_array(purpose)

    with _arrays_lock:
        array = _arrays.get((purpose, length))
        if array is None:
            # A machine-sized array is logged with its footprint
            array = WaitingArray.for_cpus() if length == WaitingArray.length_for_cpus() else WaitingArray(length)
            _arrays[(purpose, length)] = array

    return array


def build_lock(spec: BenchSpec, array: WaitingArray = None):
    if array is None:
        array = waiting_array_for(spec.lock, spec.array_size)

    return make_lock(
        spec.lock,
        array=array,
        threshold=spec.threshold,
        compact=spec.compact,
        fast_path=spec.fast_path,
    )


class Pacer:
    """Decides when a worker loop ends.

    ``stop`` also cuts fixed runs short once a worker has failed.
    """

    def __init__(self, spec: BenchSpec):
        self.iterations = spec.iterations
        self.stop = threading.Event()

    def running(self, count: int) -> bool:
        if self.iterations is None:
            return not self.stop.is_set()

        return count < self.iterations and not self.stop.is_set()


def run_workers(spec: BenchSpec, worker, pacer: Pacer, threads: int = None):
    """Run ``worker(index, gate)`` on ``threads`` threads and time them.

    ``gate`` must be called once setup is done; timing starts when every
    worker has reached it. Returns the workers' return values and the
    elapsed wall time. A worker exception propagates from here.
    """
    threads = threads or spec.threads
    barrier = threading.Barrier(threads + 1)

    def entry(index):
        try:
            return worker(index, barrier.wait)
        except BaseException:
            barrier.abort()
            pacer.stop.set()
            raise

    with ThreadPoolExecutor(max_workers=threads, thread_name_prefix=f"{spec.bench}-{spec.lock}") as pool:
        futures = [pool.submit(entry, index) for index in range(threads)]

        # A broken barrier resurfaces as the worker's own exception below
        with contextlib.suppress(threading.BrokenBarrierError):
            barrier.wait()
        start = time.perf_counter()

        if spec.iterations is None:
            pacer.stop.wait(spec.duration)
            pacer.stop.set()

        outcomes = [future.result() for future in futures]
        elapsed = time.perf_counter() - start

    return outcomes, elapsed


def check_shadow(spec: BenchSpec, shadow: int, total: int) -> None:
    if shadow != total:
        raise InvariantViolation(
            messages.get("bench", "EXCLUSION_BROKEN", spec.lock, spec.bench),
            shadow=shadow,
            total=total,
        )


def check_fifo(spec: BenchSpec, admitted: list) -> None:
    """Tickets handed out by a fresh FIFO lock must be admitted as 0, 1, 2, ..."""
    mask = MASK16 if spec.compact else MASK32

    for position, ticket in enumerate(admitted):
        if ticket != position & mask:
            raise InvariantViolation(
                messages.get("bench", "FIFO_BROKEN", spec.lock, position, ticket),
                position=position,
                ticket=ticket,
            )


def _locked_loop(spec: BenchSpec, run_index: int, cs_steps: int, non_critical, admitted: list = None) -> BenchResult:
    """Shared shape of the central-lock benchmarks.

    ``non_critical(prng)`` returns how many steps to take outside the lock.
    """
    lock = build_lock(spec)
    pacer = Pacer(spec)
    shadow = [0]

    def worker(index, gate):
        prng = Mt19937(spec.seed + index)
        count = 0
        gate()

        while pacer.running(count):
            ticket = lock.acquire()
            try:
                shadow[0] += 1
                if admitted is not None:
                    admitted.append(ticket)
                prng.advance(cs_steps)
            finally:
                lock.release()

            prng.advance(non_critical(prng))
            count += 1

        return count, prng.last

    try:
        outcomes, elapsed = run_workers(spec, worker, pacer)
    finally:
        lock.close()

    counts, states = zip(*outcomes)
    result = BenchResult.from_counts(spec, run_index, counts, elapsed, states)
    check_shadow(spec, shadow[0], result.total)

    return result


def run_mutexbench(spec: BenchSpec, run_index: int = 0) -> BenchResult:
    ncs_max = spec.ncs_max

    return _locked_loop(spec, run_index, spec.cs_steps, lambda prng: prng.uniform(ncs_max))


def run_stress_latency(spec: BenchSpec, run_index: int = 0) -> BenchResult:
    # One delay iteration is one generator step
    delay = spec.ncs_max

    return _locked_loop(spec, run_index, spec.cs_steps, lambda prng: delay)


def run_torture(spec: BenchSpec, run_index: int = 0) -> BenchResult:
    bound = spec.ncs_max + 1
    # The admission log is only bounded in fixed mode
    fifo = spec.lock in FIFO_TICKET_KINDS and not (spec.lock == "threestage" and spec.fast_path)
    admitted = [] if spec.iterations is not None and fifo else None

    result = _locked_loop(spec, run_index, spec.cs_steps, lambda prng: prng.uniform(bound), admitted)

    if admitted is not None:
        check_fifo(spec, admitted)
        result.extras["fifo_checked"] = len(admitted)

    return result


def run_interference(spec: BenchSpec, run_index: int = 0) -> tuple[BenchResult, BenchResult]:
    """Lock pool benchmark, once against the shared array and once with private arrays.

    The shared result's extras carry ``ratio`` = shared / private throughput.
    """
    shared = _interference_once(spec, run_index, private=False)
    private = _interference_once(spec, run_index, private=True)
    shared.extras["config"] = "shared"
    private.extras["config"] = "private"
    interference_ratio(shared, private)

    return shared, private


def interference_ratio(shared: BenchResult, private: BenchResult) -> float:
    """Shared over private throughput, recorded in both results' extras."""
    ratio = shared.ops_per_sec / private.ops_per_sec if private.ops_per_sec else 0.0
    shared.extras["ratio"] = private.extras["ratio"] = ratio

    return ratio


def _interference_once(spec: BenchSpec, run_index: int, private: bool) -> BenchResult:
    arrays = [WaitingArray(spec.array_size) for _ in range(spec.pool)] if private else []
    locks = [build_lock(spec, arrays[i] if private else None) for i in range(spec.pool)]
    shadows = [0] * spec.pool
    pacer = Pacer(spec)
    cs_steps, ncs_steps, pool = spec.cs_steps, spec.ncs_max, spec.pool

    def worker(index, gate):
        prng = Mt19937(spec.seed + index)
        count = 0
        gate()

        while pacer.running(count):
            i = prng.uniform(pool)
            lock = locks[i]
            lock.acquire()
            try:
                shadows[i] += 1
                prng.advance(cs_steps)
            finally:
                lock.release()

            prng.advance(ncs_steps)
            count += 1

        return count, prng.last

    try:
        outcomes, elapsed = run_workers(spec, worker, pacer)
    finally:
        for item in locks + arrays:
            item.close()

    counts, states = zip(*outcomes)
    result = BenchResult.from_counts(spec, run_index, counts, elapsed, states)
    check_shadow(spec, sum(shadows), result.total)

    return result


def run_invalidation_diameter(spec: BenchSpec, run_index: int = 0) -> BenchResult:
    """One writer increments a sequestered word while ``threads - 1`` readers load it.

    ``per_thread`` holds the writer's count only; reader loads go to extras.
    """
    block = SectorBlock(1)
    target = block.word(0, 8)
    # Sole occupant of its sector
    assert target.address % SECTOR_SIZE == 0 and block.size == SECTOR_SIZE

    pacer = Pacer(spec)

    def worker(index, gate):
        gate()

        if index == 0:
            writes = 0
            while pacer.running(writes):
                target.fetch_add(1)
                writes += 1
            pacer.stop.set()
            return writes

        loads = 0
        while not pacer.stop.is_set():
            target.load()
            loads += 1

        return loads

    try:
        outcomes, elapsed = run_workers(spec, worker, pacer)
        stored = target.load()
    finally:
        block.close()

    writes, loads = outcomes[0], sum(outcomes[1:])
    result = BenchResult.from_counts(spec, run_index, [writes], elapsed, readers=spec.threads - 1, reader_loads=loads)

    if stored != writes:
        raise InvariantViolation(messages.get("bench", "CONSERVATION_BROKEN", spec.bench), stored=stored, writes=writes)

    return result


def run_cache_bench(spec: BenchSpec, run_index: int = 0) -> BenchResult:
    lock = build_lock(spec)
    # The trace is only bounded and only reproducible single-threaded in fixed mode
    trace = [] if spec.threads == 1 and spec.iterations is not None else None
    cache = RandomCache(Config.CACHE_CAPACITY, seed=spec.seed, trace=trace)
    pacer = Pacer(spec)
    shadow = [0]
    wrong = []

    def worker(index, gate):
        prng = Mt19937(spec.seed + index)
        keyset = Keyset(prng, reuse_p=spec.reuse_p)
        count = 0
        gate()

        while pacer.running(count):
            key = keyset.next_key()
            lock.acquire()
            try:
                shadow[0] += 1
                value = cache.access(key)
            finally:
                lock.release()

            if value != fmix32(key):
                wrong.append(key)
            prng.advance(prng.uniform(spec.ncs_max))
            count += 1

        return count, prng.last

    try:
        outcomes, elapsed = run_workers(spec, worker, pacer)
    finally:
        lock.close()

    counts, states = zip(*outcomes)
    extras = dict(hits=cache.hits, misses=cache.misses, evictions=cache.evictions, resident=len(cache))
    if trace is not None:
        extras["trace_digest"] = hashlib.sha1(bytes(trace)).hexdigest()

    result = BenchResult.from_counts(spec, run_index, counts, elapsed, states, **extras)
    check_shadow(spec, shadow[0], result.total)

    if wrong:
        raise InvariantViolation(messages.get("bench", "CACHE_VALUE", wrong[0]), wrong=len(wrong))
    if len(cache) > cache.capacity:
        raise InvariantViolation(messages.get("bench", "CACHE_CAPACITY", len(cache), cache.capacity))

    return result


def run_ideal_scalability(spec: BenchSpec, run_index: int = 0, baseline: float = None) -> BenchResult:
    """Independent threads stepping private generators, nothing shared.

    ``extras["fraction"]`` is the throughput relative to one thread, divided
    by the thread count. The one-thread figure is measured first unless
    ``baseline`` already supplies it.
    """
    result = _ideal_once(spec, run_index)

    if spec.threads == 1:
        fraction = 1.0
    else:
        if baseline is None:
            baseline = _ideal_once(spec.replace(threads=1), run_index).ops_per_sec
        fraction = (result.ops_per_sec / baseline) / spec.threads if baseline else 0.0

    result.extras.update(fraction=fraction, baseline=baseline)

    return result


def _ideal_once(spec: BenchSpec, run_index: int) -> BenchResult:
    pacer = Pacer(spec)
    batch = Config.IDEAL_BATCH

    def worker(index, gate):
        prng = Mt19937(spec.seed + index)
        steps = 0
        gate()

        while pacer.running(steps):
            chunk = batch if spec.iterations is None else min(batch, spec.iterations - steps)
            prng.advance(chunk)
            steps += chunk

        return steps, prng.last

    outcomes, elapsed = run_workers(spec, worker, pacer)
    counts, states = zip(*outcomes)

    return BenchResult.from_counts(spec, run_index, counts, elapsed, states)


DRIVERS = {
    "mutex": run_mutexbench,
    "interference": run_interference,
    "invalidation": run_invalidation_diameter,
    "cache": run_cache_bench,
    "latency": run_stress_latency,
    "torture": run_torture,
    "ideal": run_ideal_scalability,
}


def run_once(spec: BenchSpec, run_index: int = 0) -> list[BenchResult]:
    """One run of ``spec.bench``; interference yields its two configurations."""
    outcome = DRIVERS[spec.bench](spec, run_index)
    results = list(outcome) if isinstance(outcome, tuple) else [outcome]

    for result in results:
        LOGGER.debug(
            messages.get("bench", "RUN_DONE", spec.bench, spec.lock, spec.threads, run_index, result.total)
        )

    return results
