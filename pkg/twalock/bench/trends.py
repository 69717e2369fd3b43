"""
Qualitative trend checks over summary results.

Absolute figures depend on the machine, so these only warn. A check is
skipped when the summaries needed for it were not produced.
"""

from twalock.bench.spec import BenchResult
from twalock.bucket.messages import messages


PARITY_TOLERANCE: float = 0.10
SCALING_FLOOR: float = 0.90
INTERFERENCE_FLOOR: float = 0.80
INVALIDATION_SLACK: float = 0.10
IDEAL_EPSILON: float = 0.10


def _throughput(summaries, bench: str, lock: str = None) -> dict[int, float]:
    return {
        r.spec.threads: r.ops_per_sec
        for r in summaries
        if r.spec.bench == bench and (lock is None or r.spec.lock == lock) and r.extras.get("config", "shared") == "shared"
    }


def assess_trends(summaries: list[BenchResult], hw_threads: int) -> list[str]:
    warnings = []

    ticket = _throughput(summaries, "mutex", "ticket")
    twa = _throughput(summaries, "mutex", "twa")
    mcs = _throughput(summaries, "mutex", "mcs")

    if 1 in ticket and 1 in twa and ticket[1]:
        if abs(twa[1] - ticket[1]) / ticket[1] > PARITY_TOLERANCE:
            warnings.append(messages.get("trends", "PARITY", twa[1], ticket[1]))

    if hw_threads in twa and (hw_threads in ticket or hw_threads in mcs):
        best = max(ticket.get(hw_threads, 0.0), mcs.get(hw_threads, 0.0))
        if twa[hw_threads] < SCALING_FLOOR * best:
            warnings.append(messages.get("trends", "SCALING", hw_threads, twa[hw_threads], best))

    if hw_threads in ticket and len(ticket) > 1:
        if ticket[hw_threads] >= max(ticket.values()):
            warnings.append(messages.get("trends", "NO_FADE", hw_threads))

    ratios = [r.extras["ratio"] for r in summaries if r.spec.bench == "interference" and "ratio" in r.extras]
    if ratios and min(ratios) < INTERFERENCE_FLOOR:
        warnings.append(messages.get("trends", "INTERFERENCE", min(ratios), INTERFERENCE_FLOOR))

    writer = _throughput(summaries, "invalidation")
    if 1 in writer and len(writer) > 1:
        widest = max(writer)
        if writer[widest] > writer[1] * (1 + INVALIDATION_SLACK):
            warnings.append(messages.get("trends", "INVALIDATION", widest - 1, writer[widest], writer[1]))

    for r in summaries:
        fraction = r.extras.get("fraction") if r.spec.bench == "ideal" else None
        if fraction is not None and not 0 < fraction <= 1 + IDEAL_EPSILON:
            warnings.append(messages.get("trends", "IDEAL", r.spec.threads, fraction))

    return warnings
