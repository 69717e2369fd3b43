import argparse
from dataclasses import dataclass

from config import Config
from twalock.bench.spec import BENCH_KINDS, BenchSpec
from twalock.bucket.messages import messages
from twalock.errors import ConfigurationError
from twalock.locks.registry import LOCK_KINDS
from twalock.locks.twa import WaitingArray, is_power_of_two


FORMATS: tuple[str, ...] = ("csv", "json")


@dataclass(frozen=True)
class Invocation:
    """A validated command line: the base spec plus the sweeps to expand it over."""

    spec: BenchSpec
    threads_sweep: tuple[int, ...] = ()
    pool_sweep: tuple[int, ...] = ()
    format: str = "csv"
    verbose: bool = False

    def specs(self) -> list[BenchSpec]:
        threads = self.threads_sweep or (self.spec.threads,)
        pools = self.pool_sweep or (self.spec.pool,)

        return [self.spec.replace(threads=t, pool=p) for t in threads for p in pools]


def positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(messages.get("cli", "NOT_AN_INT", value))

    if number < 1:
        raise argparse.ArgumentTypeError(messages.get("cli", "NOT_POSITIVE", value))

    return number


def non_negative_int(value: str) -> int:
    return 0 if value.strip() == "0" else positive_int(value)


def int_list(value: str) -> tuple[int, ...]:
    return tuple(positive_int(part) for part in value.split(",") if part.strip())


def array_size(value: str) -> int:
    if value == "auto":
        return WaitingArray.length_for_cpus()

    number = positive_int(value)
    if not is_power_of_two(number):
        raise argparse.ArgumentTypeError(messages.get("locks", "ARRAY_NOT_POW2", number))

    return number


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twalock",
        description=messages.get("cli", "DESCRIPTION"),
    )
    parser.add_argument("--bench", choices=BENCH_KINDS, default="mutex")
    parser.add_argument("--lock", choices=tuple(LOCK_KINDS), default="twa")

    threads = parser.add_mutually_exclusive_group()
    threads.add_argument("--threads", type=positive_int, help="worker threads")
    threads.add_argument("--threads-sweep", type=int_list, metavar="LIST", help="comma separated thread counts")

    mode = parser.add_mutually_exclusive_group()
    mode.add_argument("--duration", type=float, metavar="SECS", help="timed mode, seconds per run")
    mode.add_argument("--iterations", type=non_negative_int, metavar="N", help="fixed mode, iterations per thread")

    parser.add_argument("--cs-steps", type=non_negative_int, help="generator steps inside the critical section")
    parser.add_argument("--ncs-max", type=non_negative_int, help="bound on generator steps outside it")

    pool = parser.add_mutually_exclusive_group()
    pool.add_argument("--pool", type=positive_int, help="lock pool size (interference)")
    pool.add_argument("--pool-sweep", type=int_list, metavar="LIST", help="comma separated pool sizes")

    parser.add_argument("--array-size", type=array_size, default=Config.WAIT_ARRAY_SIZE, help="power of two, or 'auto'")
    parser.add_argument("--threshold", type=positive_int, default=Config.LONG_TERM_THRESHOLD)
    parser.add_argument("--runs", type=positive_int, help="runs per configuration, odd")
    parser.add_argument("--seed", type=int, default=Config.DEFAULT_SEED)
    parser.add_argument("--format", choices=FORMATS, default="csv")
    parser.add_argument("--compact", action="store_true", help="16-bit ticket and grant fields")
    parser.add_argument("--fast-path", action="store_true", help="3-stage lock tries the inner lock first")
    parser.add_argument("--verbose", action="store_true")
    parser.add_argument("--version", action="version", version=f"%(prog)s {Config.VERSION}")

    return parser


def parse_args(argv=None) -> Invocation:
    """Parse and validate a command line; usage errors exit with status 2."""
    parser = build_parser()
    args = parser.parse_args(argv)

    pool_sweep = args.pool_sweep or ()
    if args.bench == "interference" and args.pool is None and not pool_sweep:
        pool_sweep = Config.INTERFERENCE_POOL_SWEEP

    for size in pool_sweep:
        if not is_power_of_two(size):
            parser.error(messages.get("cli", "POOL_NOT_POW2", size))

    try:
        spec = BenchSpec.for_bench(
            args.bench,
            lock=args.lock,
            threads=args.threads,
            duration=args.duration,
            iterations=args.iterations,
            cs_steps=args.cs_steps,
            ncs_max=args.ncs_max,
            pool=args.pool,
            array_size=args.array_size,
            threshold=args.threshold,
            seed=args.seed,
            runs=args.runs,
            compact=args.compact,
            fast_path=args.fast_path,
        ).validate()
    except ConfigurationError as e:
        parser.error(str(e))

    return Invocation(
        spec=spec,
        threads_sweep=args.threads_sweep or (),
        pool_sweep=tuple(pool_sweep),
        format=args.format,
        verbose=args.verbose,
    )
