import os

import psutil


def _env_float(name, default):
    value = os.environ.get(name)
    return float(value) if value else default


class Config:
    BASE_LANGUAGE = "en"
    LOG_LEVEL = os.environ.get("TWALOCK_LOG_LEVEL", "INFO").upper()
    # Unset means stderr only
    LOG_FILE = os.environ.get("TWALOCK_LOG_FILE") or None

    # Hardware
    HW_THREADS = psutil.cpu_count(logical=True) or 1
    MAX_CPU_CORES_COUNT = psutil.cpu_count(logical=False) or HW_THREADS
    # Two 64-byte lines fetched together by the adjacent-line prefetcher
    SECTOR_SIZE = 128
    # Seconds the busy-wait relax hint gives up the interpreter lock for
    SPIN_PAUSE = _env_float("TWALOCK_SPIN_PAUSE", 1e-6)

    # Waiting array
    WAIT_ARRAY_SIZE = 4096
    WAIT_HASH_MULTIPLIER = 127
    WAIT_SLOTS_PER_CPU = 64
    LONG_TERM_THRESHOLD = 1

    # MCS queue nodes mapped per pool refill
    MCS_POOL_CHUNK = 4

    # Benchmarks
    DEFAULT_SEED = 5489
    MUTEX_RUNS = 5
    MUTEX_DURATION = 10.0
    CS_STEPS = 4
    NCS_MAX = 200
    INTERFERENCE_THREADS = 64
    INTERFERENCE_RUNS = 7
    INTERFERENCE_CS_STEPS = 50
    INTERFERENCE_NCS_STEPS = 100
    INTERFERENCE_POOL_SWEEP = tuple(2**i for i in range(14))  # 1 .. 8192
    INVALIDATION_RUNS = 100
    INVALIDATION_DURATION = 10.0
    CACHE_CAPACITY = 10000
    CACHE_KEY_SPACE = 50000
    KEYSET_SIZE = 10
    KEY_REUSE_P = 0.9
    LATENCY_CS = 200
    LATENCY_NCS = 5000
    TORTURE_RUNS = 7
    TORTURE_DURATION = 30.0
    TORTURE_CS = 20
    TORTURE_NCS = 20  # 400 for the moderate-contention configuration
    IDEAL_RUNS = 5
    IDEAL_DURATION = 30.0
    # PRNG steps taken per loop of the ideal-scalability workers
    IDEAL_BATCH = 64

    VERSION = "1.0"
