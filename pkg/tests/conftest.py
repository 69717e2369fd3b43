import pytest

from helpers import Crew
from twalock.locks.twa import WaitingArray


@pytest.fixture
def crew():
    crew = Crew()
    yield crew
    # Daemon threads left behind by a failed test must not outlive the watchdog
    for thread in crew.threads:
        thread.join(0.1)


@pytest.fixture
def array():
    array = WaitingArray(4096)
    yield array
    array.close()
