"""
MCS queue lock.

Waiters form an explicit linked list of queue nodes; each spins only on the
flag of its own node and the releasing thread hands over with a single store
to its successor's flag. Because acquire and release are unscoped, a thread
draws its node from a thread-local pool and the lock records the owner's node
so that release can find it.

Nodes live in their own sectors and are linked by address. A successor
spins on its own node only, so once release has stored to the successor's
flag nothing touches the successor again and the releaser's node can go
straight back to its pool.
"""

import threading
import weakref

from config import Config
from twalock import LOGGER
from twalock.bucket.messages import messages
from twalock.locks.base import SpinLock
from twalock.locks.memory import AtomicWord, Sector, SectorBlock, cpu_relax


WAIT: int = 0
GO: int = 1

# address -> node, for following links stored in shared words
_NODES: "weakref.WeakValueDictionary[int, McsNode]" = weakref.WeakValueDictionary()
_pools = threading.local()


class McsNode:
    __slots__ = ("address", "_next", "_flag", "queued_on", "__weakref__")

    def __init__(self, sector: Sector):
        self.address = sector.address
        self._next: AtomicWord = sector.word(0, 8)
        self._flag: AtomicWord = sector.word(8, 4)
        # Identity of the lock whose queue holds this node; debug only
        self.queued_on = None

    def reset(self) -> None:
        self._next.store(0)
        self._flag.store(WAIT)

    @property
    def next(self) -> int:
        return self._next.load()

    @property
    def flag(self) -> int:
        return self._flag.load()


def resolve(address: int) -> McsNode:
    return _NODES[address]


class NodePool:
    """Free list of queue nodes owned by one thread, refilled on demand."""

    def __init__(self, chunk: int = Config.MCS_POOL_CHUNK):
        self.chunk = chunk
        self.allocated = 0
        self._free: list[McsNode] = []
        # Strong references; the address map only holds weak ones
        self._nodes: list[McsNode] = []
        self._blocks: list[SectorBlock] = []

    def _refill(self) -> None:
        block = SectorBlock(self.chunk)
        self._blocks.append(block)

        for i in range(self.chunk):
            node = McsNode(block.sector(i))
            _NODES[node.address] = node
            self._nodes.append(node)
            self._free.append(node)

        self.allocated += self.chunk
        LOGGER.debug(f"mcs node pool grew to {self.allocated} nodes")

    def take(self) -> McsNode:
        if not self._free:
            self._refill()

        node = self._free.pop()
        node.reset()

        return node

    def give(self, node: McsNode) -> None:
        self._free.append(node)

    @property
    def free(self) -> int:
        return len(self._free)


def node_pool() -> NodePool:
    pool = getattr(_pools, "pool", None)
    if pool is None:
        pool = _pools.pool = NodePool()

    return pool


class McsLock(SpinLock):
    kind = "mcs"
    fifo = True

    def __init__(self, storage: Sector = None):
        super().__init__()
        if storage is None:
            storage = self._own(SectorBlock(1)).sector(0)
        self.storage = storage
        self.identity = storage.address
        self._tail: AtomicWord = storage.word(0, 8)
        # Written and read by the holder only
        self._owner: AtomicWord = storage.word(8, 8)

    @property
    def tail(self) -> int:
        return self._tail.load()

    def locked(self) -> bool:
        return self._tail.load() != 0

    def acquire(self) -> None:
        node = node_pool().take()

        if __debug__:
            assert node.queued_on is None, messages.get("locks", "NODE_QUEUED", node.address, node.queued_on)
            node.queued_on = self.identity

        predecessor = self._tail.exchange(node.address)

        if predecessor:
            resolve(predecessor)._next.store(node.address)
            while node._flag.load() == WAIT:
                cpu_relax()

        self._owner.store(node.address)
        self._mark_held()

    def release(self) -> None:
        self._mark_released()
        node = resolve(self._owner.load())
        successor = node._next.load()

        if not successor:
            if self._tail.cas(node.address, 0):
                self._recycle(node)
                return

            # A successor swapped itself into tail but has not linked yet
            while not (successor := node._next.load()):
                cpu_relax()

        resolve(successor)._flag.store(GO)
        self._recycle(node)

    def _recycle(self, node: McsNode) -> None:
        if __debug__:
            node.queued_on = None
        node_pool().give(node)
