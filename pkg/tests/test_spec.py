import pytest

from config import Config
from twalock.bench.spec import BenchResult, BenchSpec, aggregate_median, jains_fairness
from twalock.errors import ConfigurationError


def result(ops_per_sec, run_index=0):
    spec = BenchSpec.for_bench("mutex")
    return BenchResult.from_counts(spec, run_index, [ops_per_sec], 1.0)


@pytest.mark.parametrize(
    "throughputs, expected",
    [([3], 3), ([1, 2, 3], 2), ([5, 1, 9, 3, 7], 5)],
)
def test_median_of_odd_runs(throughputs, expected):
    summary = aggregate_median(result(x, i) for i, x in enumerate(throughputs))

    assert summary.ops_per_sec == expected
    assert summary.is_summary
    assert summary.extras["median_of"] == len(throughputs)


@pytest.mark.parametrize("count", [0, 2, 4])
def test_median_rejects_even_counts(count):
    with pytest.raises(ConfigurationError):
        aggregate_median(result(i, i) for i in range(count))


def test_median_keeps_the_chosen_run_intact():
    runs = [result(x, i) for i, x in enumerate([10, 30, 20])]
    summary = aggregate_median(runs)

    assert summary.per_thread == [20]
    assert runs[2].run_index == 2


@pytest.mark.parametrize(
    "counts, expected",
    [([1, 1, 1, 1], 1.0), ([4, 0, 0, 0], 0.25), ([0, 0], 1.0), ([7], 1.0)],
)
def test_jains_fairness(counts, expected):
    assert jains_fairness(counts) == pytest.approx(expected)


def test_result_from_counts():
    spec = BenchSpec.for_bench("mutex", threads=2, iterations=10)
    res = BenchResult.from_counts(spec, 1, [10, 10], 0.5, readers=3)

    assert res.total == 20
    assert res.ops_per_sec == 40
    assert res.fairness == 1.0
    assert res.extras == {"readers": 3}
    assert not res.is_summary


def test_zero_elapsed_is_zero_throughput():
    spec = BenchSpec.for_bench("mutex", iterations=0)

    assert BenchResult.from_counts(spec, 0, [0], 0.0).ops_per_sec == 0.0


def test_per_bench_defaults():
    interference = BenchSpec.for_bench("interference")
    torture = BenchSpec.for_bench("torture")
    invalidation = BenchSpec.for_bench("invalidation")

    assert (interference.runs, interference.threads) == (Config.INTERFERENCE_RUNS, Config.INTERFERENCE_THREADS)
    assert (interference.cs_steps, interference.ncs_max) == (50, 100)
    assert (torture.cs_steps, torture.ncs_max, torture.runs) == (20, 20, 7)
    assert invalidation.runs == 100
    assert BenchSpec.for_bench("latency").ncs_max == 5000


def test_overrides_win_and_none_is_ignored():
    spec = BenchSpec.for_bench("torture", ncs_max=400, threads=None)

    assert spec.ncs_max == 400
    assert spec.threads == 1


def test_iterations_switch_to_fixed_mode():
    timed = BenchSpec.for_bench("mutex", duration=2.0)
    fixed = BenchSpec.for_bench("mutex", iterations=1000)

    assert (timed.mode, timed.param) == ("timed", 2.0)
    assert (fixed.mode, fixed.param, fixed.duration) == ("fixed", 1000, None)
    assert fixed.validate() is fixed


def test_unknown_bench():
    with pytest.raises(ConfigurationError, match="nosuch"):
        BenchSpec.for_bench("nosuch")


@pytest.mark.parametrize(
    "changes, fragment",
    [
        (dict(lock="nosuch"), "nosuch"),
        (dict(threads=0), "thread"),
        (dict(runs=4), "odd"),
        (dict(iterations=10), "exactly one"),
        (dict(duration=None), "exactly one"),
        (dict(duration=-1.0), "duration"),
        (dict(cs_steps=-1), "step"),
        (dict(pool=0), "pool"),
        (dict(array_size=1000), "power of two"),
        (dict(threshold=4096), "threshold"),
        (dict(threshold=0), "threshold"),
        (dict(reuse_p=1.5), "reuse"),
    ],
)
def test_validation_errors(changes, fragment):
    spec = BenchSpec.for_bench("mutex").replace(**changes)

    with pytest.raises(ConfigurationError, match=fragment):
        spec.validate()


@pytest.mark.parametrize("lock", ["ticket", "mcs", "tktdual", "threestage", "tas"])
def test_interference_needs_a_waiting_array_lock(lock):
    with pytest.raises(ConfigurationError, match=f"needs one of: twa, twaid, got '{lock}'"):
        BenchSpec.for_bench("interference", lock=lock).validate()


def test_interference_accepts_waiting_array_locks():
    assert BenchSpec.for_bench("interference", lock="twaid").validate().lock == "twaid"


def test_single_slot_array_with_threshold_one_is_valid():
    assert BenchSpec.for_bench("mutex", array_size=1, threshold=1).validate()
