import dataclasses
from dataclasses import dataclass, field

from config import Config
from twalock.bucket.messages import messages
from twalock.errors import ConfigurationError
from twalock.locks.registry import ARRAY_KINDS, LOCK_KINDS
from twalock.locks.twa import is_power_of_two


BENCH_KINDS: tuple[str, ...] = ("mutex", "interference", "invalidation", "cache", "latency", "torture", "ideal")

# Per-benchmark defaults: runs, seconds per run, critical and non-critical steps
BENCH_DEFAULTS: dict[str, dict] = {
    "mutex": dict(runs=Config.MUTEX_RUNS, duration=Config.MUTEX_DURATION, cs_steps=Config.CS_STEPS, ncs_max=Config.NCS_MAX),
    "interference": dict(
        runs=Config.INTERFERENCE_RUNS,
        duration=Config.MUTEX_DURATION,
        cs_steps=Config.INTERFERENCE_CS_STEPS,
        ncs_max=Config.INTERFERENCE_NCS_STEPS,
        threads=Config.INTERFERENCE_THREADS,
    ),
    "invalidation": dict(runs=Config.INVALIDATION_RUNS, duration=Config.INVALIDATION_DURATION, cs_steps=0, ncs_max=0),
    "cache": dict(runs=Config.MUTEX_RUNS, duration=Config.MUTEX_DURATION, cs_steps=0, ncs_max=Config.NCS_MAX),
    "latency": dict(runs=Config.MUTEX_RUNS, duration=Config.MUTEX_DURATION, cs_steps=Config.LATENCY_CS, ncs_max=Config.LATENCY_NCS),
    "torture": dict(runs=Config.TORTURE_RUNS, duration=Config.TORTURE_DURATION, cs_steps=Config.TORTURE_CS, ncs_max=Config.TORTURE_NCS),
    "ideal": dict(runs=Config.IDEAL_RUNS, duration=Config.IDEAL_DURATION, cs_steps=0, ncs_max=0),
}


@dataclass(frozen=True)
class BenchSpec:
    """Immutable description of one benchmark configuration.

    Exactly one of ``duration`` (timed mode, seconds per run) and
    ``iterations`` (fixed mode, iterations per thread) is set.
    """

    bench: str
    lock: str = "twa"
    threads: int = 1
    duration: float = Config.MUTEX_DURATION
    iterations: int = None
    cs_steps: int = Config.CS_STEPS
    ncs_max: int = Config.NCS_MAX
    pool: int = 1
    array_size: int = Config.WAIT_ARRAY_SIZE
    threshold: int = Config.LONG_TERM_THRESHOLD
    seed: int = Config.DEFAULT_SEED
    runs: int = Config.MUTEX_RUNS
    compact: bool = False
    fast_path: bool = False
    reuse_p: float = Config.KEY_REUSE_P

    @classmethod
    def for_bench(cls, bench: str, **overrides) -> "BenchSpec":
        """A spec carrying the benchmark's own defaults, then ``overrides``."""
        if bench not in BENCH_DEFAULTS:
            raise ConfigurationError(messages.get("bench", "UNKNOWN_BENCH", bench, ", ".join(BENCH_KINDS)))

        values = dict(BENCH_DEFAULTS[bench])
        values.update({k: v for k, v in overrides.items() if v is not None})
        if overrides.get("iterations") is not None and overrides.get("duration") is None:
            values["duration"] = None

        return cls(bench=bench, **values)

    @property
    def mode(self) -> str:
        return "timed" if self.iterations is None else "fixed"

    @property
    def param(self):
        return self.duration if self.iterations is None else self.iterations

    def replace(self, **changes) -> "BenchSpec":
        return dataclasses.replace(self, **changes)

    def validate(self) -> "BenchSpec":
        def fail(key, *args):
            raise ConfigurationError(messages.get("bench", key, *args))

        if self.bench not in BENCH_KINDS:
            fail("UNKNOWN_BENCH", self.bench, ", ".join(BENCH_KINDS))
        if self.lock not in LOCK_KINDS:
            fail("UNKNOWN_LOCK", self.lock, ", ".join(LOCK_KINDS))
        if self.bench == "interference" and self.lock not in ARRAY_KINDS:
            fail("INTERFERENCE_LOCK", ", ".join(ARRAY_KINDS), self.lock)
        if self.threads < 1:
            fail("BAD_THREADS", self.threads)
        if self.runs < 1 or self.runs % 2 == 0:
            fail("EVEN_RUNS", self.runs)
        if (self.duration is None) == (self.iterations is None):
            fail("MODE_CONFLICT")
        if self.duration is not None and self.duration <= 0:
            fail("BAD_DURATION", self.duration)
        if self.iterations is not None and self.iterations < 0:
            fail("BAD_ITERATIONS", self.iterations)
        if self.cs_steps < 0 or self.ncs_max < 0:
            fail("BAD_STEPS", self.cs_steps, self.ncs_max)
        if self.pool < 1:
            fail("BAD_POOL", self.pool)
        if not is_power_of_two(self.array_size):
            fail("ARRAY_NOT_POW2", self.array_size)
        if self.threshold < 1 or (self.array_size > 1 and self.threshold >= self.array_size):
            fail("BAD_THRESHOLD", self.threshold, self.array_size)
        if not 0.0 <= self.reuse_p <= 1.0:
            fail("BAD_REUSE", self.reuse_p)

        return self


def jains_fairness(values) -> float:
    # 1.0 when every thread did the same amount of work, 1/n when one did all of it
    squares = sum(x**2 for x in values)
    if not squares:
        return 1.0

    return (sum(values) ** 2) / (len(values) * squares)


@dataclass
class BenchResult:
    spec: BenchSpec
    run_index: int
    per_thread: list[int]
    total: int
    elapsed: float
    ops_per_sec: float
    fairness: float
    thread_states: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @classmethod
    def from_counts(cls, spec: BenchSpec, run_index: int, per_thread, elapsed: float, thread_states=(), **extras):
        per_thread = list(per_thread)
        total = sum(per_thread)

        return cls(
            spec=spec,
            run_index=run_index,
            per_thread=per_thread,
            total=total,
            elapsed=elapsed,
            ops_per_sec=total / elapsed if elapsed > 0 else 0.0,
            fairness=jains_fairness(per_thread),
            thread_states=list(thread_states),
            extras=extras,
        )

    @property
    def is_summary(self) -> bool:
        return self.run_index is None


def aggregate_median(results) -> BenchResult:
    """The run with the median throughput, relabelled as the summary."""
    results = list(results)

    if not results or len(results) % 2 == 0:
        raise ConfigurationError(messages.get("bench", "EVEN_RUNS", len(results)))

    median = sorted(results, key=lambda r: r.ops_per_sec)[len(results) // 2]

    return dataclasses.replace(median, run_index=None, extras={**median.extras, "median_of": len(results)})
