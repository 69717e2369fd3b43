"""
Result records and their CSV and JSON encodings.

Columns, in order: bench,lock,threads,mode,param,run,total_ops,ops_per_sec.
``run`` is the run index, or ``median`` for the summary row of a
configuration. Interference rows label the lock with its array
configuration (``twa/shared``, ``twa/private``) and the bench with the pool
size (``interference[pool=16]``).
"""

import csv
import json
from dataclasses import asdict, dataclass

from twalock.bench.spec import BenchResult


CSV_COLUMNS: tuple[str, ...] = ("bench", "lock", "threads", "mode", "param", "run", "total_ops", "ops_per_sec")
MEDIAN: str = "median"


@dataclass(frozen=True)
class OutputRecord:
    bench: str
    lock: str
    threads: int
    mode: str
    param: float
    run: object
    total_ops: int
    ops_per_sec: float

    @classmethod
    def from_result(cls, result: BenchResult) -> "OutputRecord":
        spec = result.spec
        bench, lock = spec.bench, spec.lock

        if "config" in result.extras:
            bench = f"{bench}[pool={spec.pool}]"
            lock = f"{lock}/{result.extras['config']}"

        return cls(
            bench=bench,
            lock=lock,
            threads=spec.threads,
            mode=spec.mode,
            param=spec.param,
            run=MEDIAN if result.run_index is None else result.run_index,
            total_ops=result.total,
            ops_per_sec=result.ops_per_sec,
        )

    @classmethod
    def from_row(cls, row: dict) -> "OutputRecord":
        """Rebuild a record from a CSV row (all strings) or a JSON object."""
        mode = str(row["mode"])
        run = row["run"]

        return cls(
            bench=str(row["bench"]),
            lock=str(row["lock"]),
            threads=int(row["threads"]),
            mode=mode,
            param=int(row["param"]) if mode == "fixed" else float(row["param"]),
            run=MEDIAN if str(run) == MEDIAN else int(run),
            total_ops=int(row["total_ops"]),
            ops_per_sec=float(row["ops_per_sec"]),
        )

    def as_row(self) -> dict:
        return asdict(self)

    @property
    def is_summary(self) -> bool:
        return self.run == MEDIAN


class CsvEmitter:
    """Streams one row per record as it arrives."""

    def __init__(self, stream):
        self.stream = stream
        self.count = 0
        self._writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS, lineterminator="\n")
        self._writer.writeheader()

    def emit(self, record: OutputRecord) -> None:
        self._writer.writerow(record.as_row())
        self.stream.flush()
        self.count += 1

    def close(self) -> None:
        self.stream.flush()


class JsonEmitter:
    """Collects records and writes a single JSON array on close."""

    def __init__(self, stream):
        self.stream = stream
        self.records: list[OutputRecord] = []

    @property
    def count(self) -> int:
        return len(self.records)

    def emit(self, record: OutputRecord) -> None:
        self.records.append(record)

    def close(self) -> None:
        json.dump([r.as_row() for r in self.records], self.stream, indent=2)
        self.stream.write("\n")
        self.stream.flush()


def make_emitter(fmt: str, stream):
    return JsonEmitter(stream) if fmt == "json" else CsvEmitter(stream)


def read_csv(text: str) -> list[OutputRecord]:
    return [OutputRecord.from_row(row) for row in csv.DictReader(text.splitlines())]


def read_json(text: str) -> list[OutputRecord]:
    return [OutputRecord.from_row(row) for row in json.loads(text)]
