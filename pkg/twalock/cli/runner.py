import logging
import sys
import time
from collections import defaultdict

from config import Config
from twalock import LOGGER, boottime
from twalock.bench.drivers import interference_ratio, run_once
from twalock.bench.spec import BenchResult, aggregate_median
from twalock.bench.trends import assess_trends
from twalock.bucket.messages import messages
from twalock.cli.args import Invocation, parse_args
from twalock.cli.output import OutputRecord, make_emitter
from twalock.errors import InvariantViolation
from twalock.others.help import humanrate, timeformat_sec


def run_configuration(spec, emitter) -> list[BenchResult]:
    """All runs of one configuration, each emitted as it completes, then its summaries."""
    LOGGER.info(messages.get("cli", "CONFIG_START", spec.bench, spec.lock, spec.threads, spec.runs, spec.mode, spec.param))
    by_config: dict[str, list[BenchResult]] = defaultdict(list)

    for run_index in range(spec.runs):
        for result in run_once(spec, run_index):
            emitter.emit(OutputRecord.from_result(result))
            by_config[result.extras.get("config", "")].append(result)

    summaries = {config: aggregate_median(results) for config, results in by_config.items()}
    if "shared" in summaries and "private" in summaries:
        # Ratio of the medians, not the median of per-run ratios
        ratio = interference_ratio(summaries["shared"], summaries["private"])
        LOGGER.info(messages.get("cli", "INTERFERENCE_RATIO", spec.lock, spec.pool, spec.threads, ratio))

    for config, summary in summaries.items():
        emitter.emit(OutputRecord.from_result(summary))
        LOGGER.info(
            messages.get(
                "cli",
                "CONFIG_DONE",
                spec.bench,
                spec.lock + (f"/{config}" if config else ""),
                spec.threads,
                humanrate(summary.ops_per_sec),
                round(summary.fairness, 3),
            )
        )

    return list(summaries.values())


def execute(invocation: Invocation, stream=None) -> int:
    """Run every configuration of ``invocation`` and write the records to ``stream``.

    Returns the process exit status: 0 when every run completed with its
    invariants intact, 1 otherwise. Records produced before a failure are
    still written.
    """
    if stream is None:
        stream = sys.stdout
    emitter = make_emitter(invocation.format, stream)
    summaries: list[BenchResult] = []
    status = 0

    try:
        for spec in invocation.specs():
            summaries.extend(run_configuration(spec, emitter))
    except InvariantViolation as e:
        LOGGER.error(messages.get("cli", "INVARIANT", e), exc_info=True)
        status = 1
    except Exception as e:
        LOGGER.critical(messages.get("cli", "RUN_FAILED", e), exc_info=True)
        status = 1
    finally:
        emitter.close()

    if status:
        LOGGER.error(messages.get("cli", "PARTIAL_OUTPUT", emitter.count))
        return status

    for warning in assess_trends(summaries, Config.HW_THREADS):
        LOGGER.warning(warning)

    LOGGER.info(messages.get("cli", "FINISHED", len(summaries), timeformat_sec(time.time() - boottime)))

    return status


def main(argv=None) -> int:
    invocation = parse_args(argv)

    if invocation.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    return execute(invocation)
