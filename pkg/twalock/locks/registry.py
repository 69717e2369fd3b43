from config import Config
from twalock.bucket.messages import messages
from twalock.errors import ConfigurationError
from twalock.locks.base import SpinLock
from twalock.locks.mcs import McsLock
from twalock.locks.memory import Sector
from twalock.locks.tas import TasLock
from twalock.locks.ticket import TicketLock
from twalock.locks.twa import TwaLock, WaitingArray
from twalock.locks.variants import ThreeStageLock, TktDualLock, TwaIdLock


LOCK_KINDS: dict[str, type[SpinLock]] = {
    "ticket": TicketLock,
    "twa": TwaLock,
    "mcs": McsLock,
    "tktdual": TktDualLock,
    "twaid": TwaIdLock,
    "threestage": ThreeStageLock,
    "tas": TasLock,
}

# Kinds admitting strictly in arrival order; threestage only without its fast path
FIFO_KINDS: tuple[str, ...] = ("ticket", "twa", "mcs", "tktdual", "twaid", "threestage")

# Kinds taking a waiting array from make_lock
ARRAY_KINDS: tuple[str, ...] = ("twa", "twaid")


def make_lock(
    kind: str,
    *,
    array: WaitingArray = None,
    threshold: int = Config.LONG_TERM_THRESHOLD,
    compact: bool = False,
    fast_path: bool = False,
    storage: Sector = None,
) -> SpinLock:
    """Build a lock by its command-line name.

    Options a kind has no use for are ignored, so one call site can build
    every kind from the same benchmark settings.
    """
    if kind not in LOCK_KINDS:
        raise ConfigurationError(messages.get("locks", "UNKNOWN_KIND", kind, ", ".join(LOCK_KINDS)))

    if kind == "ticket":
        return TicketLock(storage, compact=compact)
    if kind == "twa":
        return TwaLock(storage, array=array, threshold=threshold, compact=compact)
    if kind == "twaid":
        return TwaIdLock(storage, array=array, threshold=threshold, compact=compact)
    if kind == "tktdual":
        return TktDualLock(storage, threshold=threshold)
    if kind == "threestage":
        return ThreeStageLock(storage, fast_path=fast_path, compact=compact)

    return LOCK_KINDS[kind](storage)
