from twalock.bench.spec import BenchResult, BenchSpec
from twalock.bench.trends import assess_trends


def summary(bench, lock="twa", threads=1, ops=1000.0, **extras):
    spec = BenchSpec.for_bench(bench, lock=lock, threads=threads)
    return BenchResult.from_counts(spec, None, [ops], 1.0, **extras)


def healthy(hw):
    return [
        summary("mutex", "ticket", 1, 1000),
        summary("mutex", "twa", 1, 1050),
        summary("mutex", "mcs", 1, 900),
        summary("mutex", "ticket", 2, 1500),
        summary("mutex", "ticket", hw, 600),
        summary("mutex", "twa", hw, 1400),
        summary("mutex", "mcs", hw, 1300),
        summary("interference", threads=hw, ratio=0.97, config="shared"),
        summary("invalidation", threads=1, ops=5000),
        summary("invalidation", threads=hw, ops=3000),
        summary("ideal", threads=hw, fraction=0.93),
    ]


def test_expected_trends_raise_nothing():
    assert assess_trends(healthy(8), hw_threads=8) == []


def test_nothing_to_assess():
    assert assess_trends([], hw_threads=8) == []


def test_single_thread_parity():
    results = [summary("mutex", "ticket", 1, 1000), summary("mutex", "twa", 1, 700)]

    warnings = assess_trends(results, hw_threads=8)

    assert len(warnings) == 1 and "10%" in warnings[0]


def test_twa_falling_behind_at_full_load():
    results = healthy(8)
    results[5] = summary("mutex", "twa", 8, 900)

    assert any("best baseline" in w for w in assess_trends(results, hw_threads=8))


def test_ticket_lock_that_keeps_scaling():
    results = healthy(8)
    results[4] = summary("mutex", "ticket", 8, 2000)

    assert any("did not fall" in w for w in assess_trends(results, hw_threads=8))


def test_interference_ratio_floor():
    results = healthy(8) + [summary("interference", threads=8, ratio=0.5, config="shared")]

    assert any("interference" in w for w in assess_trends(results, hw_threads=8))


def test_private_rows_are_not_throughput_baselines():
    results = healthy(8) + [summary("mutex", "ticket", 8, 9000, config="private")]

    assert assess_trends(results, hw_threads=8) == []


def test_writer_faster_with_readers():
    results = healthy(8)
    results[9] = summary("invalidation", threads=8, ops=8000)

    assert any("7 readers" in w for w in assess_trends(results, hw_threads=8))


def test_ideal_fraction_outside_range():
    results = healthy(8) + [summary("ideal", threads=4, fraction=1.5)]

    assert any("ideal" in w for w in assess_trends(results, hw_threads=8))
