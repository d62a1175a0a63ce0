"""Persistent object file with an indirect access table.

``lexicon.obj`` holds one canonical-text record per entry, in ID order.
``lexicon.tab`` holds, for every ID ``i``, the byte offset of record ``i``
as an 8-byte big-endian unsigned integer at position ``8 * i``.

Fetching an object costs two seek+read pairs: one in the access table
(which also yields the next record's offset, hence the record length)
and one in the object file.  Every pair is counted.
"""

from __future__ import annotations

import os
import struct
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Union

from .codec import encode_record, from_canonical_text
from .errors import CodecError, StoreError
from .featgraph import Node

OBJ_FILE = "lexicon.obj"
TAB_FILE = "lexicon.tab"
_OFFSET = struct.Struct(">Q")


@dataclass(frozen=True)
class LexicalEntry:
    id: int
    graph: Node


class Counters:
    """Thread-safe I/O counters."""

    FIELDS = ("seeks", "reads", "bytes_read", "tab_reads", "obj_reads",
              "meta_reads", "fallback_scans")

    def __init__(self):
        self._lock = threading.Lock()
        self._values = dict.fromkeys(self.FIELDS, 0)

    def add(self, **deltas: int) -> None:
        with self._lock:
            for k, v in deltas.items():
                self._values[k] += v

    def reset(self) -> None:
        with self._lock:
            self._values = dict.fromkeys(self.FIELDS, 0)

    def snapshot(self) -> Dict[str, int]:
        with self._lock:
            return dict(self._values)


class Stream:
    """A random-access read-only file whose seek+read pairs are atomic and counted."""

    def __init__(self, path: Path, counters: Counters, kind: str):
        self.path = path
        self.kind = kind
        self._f = open(path, "rb", buffering=0)
        self.size = os.fstat(self._f.fileno()).st_size
        self._counters = counters
        self._lock = threading.Lock()

    def read_at(self, offset: int, size: int) -> bytes:
        with self._lock:
            self._f.seek(offset)
            data = self._f.read(size)
        self._counters.add(seeks=1, reads=1, bytes_read=len(data), **{f"{self.kind}_reads": 1})
        return data

    def close(self):
        self._f.close()


def build_store(entries: Iterable[LexicalEntry], directory: Union[str, Path]) -> int:
    """Write the object file and access table; return the entry count."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    obj_path, tab_path = directory / OBJ_FILE, directory / TAB_FILE
    n = 0
    try:
        with open(obj_path, "wb") as obj, open(tab_path, "wb") as tab:
            offset = 0
            for expected, entry in enumerate(entries):
                if entry.id != expected:
                    raise ValueError(f"entries out of ID order: got {entry.id}, expected {expected}")
                tab.write(_OFFSET.pack(offset))
                data = encode_record(entry.graph)
                obj.write(data)
                offset += len(data)
                n += 1
    except BaseException:
        for p in (obj_path, tab_path):
            p.unlink(missing_ok=True)
        raise
    return n


class StoreHandle:
    """An opened store.  Index tables are attached later by :mod:`objlex.index`."""

    def __init__(self, directory: Union[str, Path]):
        self.directory = Path(directory)
        self.counters = Counters()
        obj_path, tab_path = self.directory / OBJ_FILE, self.directory / TAB_FILE
        for p in (obj_path, tab_path):
            if not p.is_file():
                raise StoreError("missing-file", str(p))
        self.obj = Stream(obj_path, self.counters, "obj")
        self.tab = Stream(tab_path, self.counters, "tab")
        self.indexes = None
        try:
            self._check()
        except StoreError:
            self.close()
            raise
        self.counters.reset()

    def _check(self):
        if self.tab.size % _OFFSET.size:
            raise StoreError("not-multiple-of-8", f"{self.tab.path} has {self.tab.size} bytes")
        self.n = self.tab.size // _OFFSET.size
        if self.n == 0:
            if self.obj.size:
                raise StoreError("dangling-offset", "empty access table but non-empty object file")
            return
        first = _OFFSET.unpack(self.tab.read_at(0, 8))[0]
        last = _OFFSET.unpack(self.tab.read_at(8 * (self.n - 1), 8))[0]
        if first != 0:
            raise StoreError("bad-first-offset", f"record 0 starts at {first}")
        if last >= self.obj.size:
            raise StoreError("dangling-offset",
                             f"record {self.n - 1} at {last} but object file has {self.obj.size} bytes")

    def __len__(self):
        return self.n

    def _record(self, oid: int) -> bytes:
        if not 0 <= oid < self.n:
            raise IndexError(f"object id {oid} out of range 0..{self.n - 1}")
        last = oid == self.n - 1
        raw = self.tab.read_at(8 * oid, 8 if last else 16)
        start = _OFFSET.unpack_from(raw, 0)[0]
        end = self.obj.size if last else _OFFSET.unpack_from(raw, 8)[0]
        if not start < end <= self.obj.size:
            raise StoreError("dangling-offset", f"record {oid} spans {start}..{end}")
        return self.obj.read_at(start, end - start)

    def get_object(self, oid: int, fresh=True) -> LexicalEntry:
        """Load entry ``oid`` with freshly renamed variables.

        ``fresh`` is passed to the decoder (an iterator of integers gives
        reproducible variable names).
        """
        data = self._record(oid)
        try:
            graph = from_canonical_text(data.decode("utf-8"), fresh=fresh)
        except (CodecError, UnicodeDecodeError) as e:
            raise StoreError("corrupt-record", f"object {oid}: {e}") from e
        return LexicalEntry(oid, graph)

    def raw_record(self, oid: int) -> bytes:
        """The exact bytes of record ``oid``, terminator included."""
        return self._record(oid)

    def stats(self) -> Dict[str, int]:
        return self.counters.snapshot()

    def close(self):
        self.obj.close()
        self.tab.close()
        if self.indexes is not None:
            self.indexes.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def open_store(directory: Union[str, Path]) -> StoreHandle:
    return StoreHandle(directory)
