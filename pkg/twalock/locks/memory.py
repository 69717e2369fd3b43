"""
Sector-aligned shared storage for lock words.

Lock state lives in anonymous ``mmap`` regions rather than in Python objects
so that the layout rules the algorithms depend on are real: every block is
page aligned, every sector is ``Config.SECTOR_SIZE`` bytes, and every word is
a hardware atomic reached through an ``atomics`` view. The numeric address of
a sector doubles as the identity of the lock stored in it.
"""

import contextlib
import ctypes
import mmap
import threading
import time

import atomics

from config import Config
from twalock.errors import ConfigurationError


SECTOR_SIZE: int = Config.SECTOR_SIZE
WORD_WIDTHS: tuple[int, ...] = (2, 4, 8)


def cpu_relax() -> None:
    """Busy-wait politeness hint.

    The interpreter has no PAUSE instruction; the closest equivalent is to
    give up the interpreter lock so the holder can run.
    """
    time.sleep(Config.SPIN_PAUSE)


def sector_of(address: int) -> int:
    return address // SECTOR_SIZE


class AtomicWord:
    """Unsigned hardware-atomic integer of 2, 4 or 8 bytes.

    Every operation is sequentially consistent.
    """

    __slots__ = ("_view", "width", "mask", "address")

    def __init__(self, view, width: int, address: int):
        self._view = view
        self.width = width
        self.mask = (1 << (8 * width)) - 1
        self.address = address

    def load(self) -> int:
        return self._view.load()

    def store(self, value: int) -> None:
        self._view.store(value & self.mask)

    def fetch_add(self, delta: int) -> int:
        return self._view.fetch_add(delta & self.mask)

    def fetch_inc(self) -> int:
        return self._view.fetch_inc()

    def exchange(self, value: int) -> int:
        return self._view.exchange(value & self.mask)

    def cas(self, expected: int, desired: int) -> bool:
        result = self._view.cmpxchg_strong(expected=expected, desired=desired & self.mask)
        return result.success

    def __repr__(self):
        return f"AtomicWord(width={self.width}, address={self.address:#x}, value={self.load()})"


class SectorBlock:
    """Page-aligned run of ``sectors`` cache sectors backed by an anonymous map."""

    def __init__(self, sectors: int = 1):
        if sectors < 1:
            raise ConfigurationError(f"a sector block needs at least one sector, got {sectors}")

        self.sectors = sectors
        self.size = sectors * SECTOR_SIZE
        self._map = mmap.mmap(-1, self.size)
        self._buffer = memoryview(self._map)
        self.address = ctypes.addressof(ctypes.c_char.from_buffer(self._map))
        self._views = contextlib.ExitStack()
        # Guards lazy view creation only
        self._lock = threading.Lock()
        self.closed = False

    def word(self, offset: int, width: int = 4) -> AtomicWord:
        if width not in WORD_WIDTHS:
            raise ConfigurationError(f"unsupported atomic width {width}")
        if offset % width or not 0 <= offset <= self.size - width:
            raise ConfigurationError(f"misplaced {width}-byte word at offset {offset}")

        with self._lock:
            view = self._views.enter_context(
                atomics.atomicview(buffer=self._buffer[offset : offset + width], atype=atomics.UINT)
            )

        return AtomicWord(view, width, self.address + offset)

    def sector(self, index: int = 0) -> "Sector":
        if not 0 <= index < self.sectors:
            raise IndexError(f"sector {index} outside a block of {self.sectors}")

        return Sector(self, index)

    def close(self) -> None:
        if self.closed:
            return
        self.closed = True
        self._views.close()
        # Outstanding AtomicWord objects may still pin the map; it is
        # unmapped when the last of them is collected.
        with contextlib.suppress(BufferError):
            self._buffer.release()
            self._map.close()

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()
        return False


class Sector:
    """One ``SECTOR_SIZE`` slice of a block; words are addressed relative to it."""

    __slots__ = ("block", "index", "address")

    def __init__(self, block: SectorBlock, index: int):
        self.block = block
        self.index = index
        self.address = block.address + index * SECTOR_SIZE

    def word(self, offset: int, width: int = 4) -> AtomicWord:
        if not 0 <= offset <= SECTOR_SIZE - width:
            raise ConfigurationError(f"word at offset {offset} leaves its sector")

        return self.block.word(self.index * SECTOR_SIZE + offset, width)