"""In-memory index tables and the external meta index.

Three tables live in memory after open and cost no disk access:

* ``index.typ``  type key -> posting list
* ``index.con``  word hash of CONCEPT -> bucket of (text, posting list)
* ``index.pho``  word hash of PHON    -> bucket of (text, posting list)

The meta index maps (path, value) to two offsets into ``meta.dat``: the
record listing entries with that value, and the record listing entries
that leave the path unspecified.  Only ``meta.idx`` is held in memory;
each posting list read from ``meta.dat`` is one counted disk access.

File records::

    index.typ   key TAB [postings] .
    index.con   hash TAB 'text' TAB [postings] .
    meta.idx    path US value TAB matchOffset TAB unspecOffset .
    meta.dat    [postings] .

A ``meta.idx`` record with an empty value and match offset -1 declares a
path that was indexed but never observed with a value.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .category import type_key
from .codec import from_canonical_text, quote_atom, to_canonical_text
from .errors import StoreError
from .featgraph import Atom, Disj, Node, Number, Path, format_path, parse_path
from .postings import PostingList, compress, format_postings, parse_postings, union
from .schema import RESERVED_PATHS, category_of, concept_of, meta_value, phon_of
from .store import LexicalEntry, StoreHandle, Stream, build_store
from .wordhash import word_hash

TYPE_FILE = "index.typ"
CONCEPT_FILE = "index.con"
PHON_FILE = "index.pho"
META_INDEX_FILE = "meta.idx"
META_DATA_FILE = "meta.dat"
INDEX_FILES = (TYPE_FILE, CONCEPT_FILE, PHON_FILE, META_INDEX_FILE)

US = "\x1f"
STRICT = "strict"
LIBERAL = "liberal"


class WordTable:
    """Word hash -> collision bucket {original text: posting list}."""

    def __init__(self, buckets: Optional[Dict[int, Dict[str, PostingList]]] = None):
        self.buckets: Dict[int, Dict[str, PostingList]] = buckets or {}

    @classmethod
    def from_ids(cls, ids_by_text: Dict[str, List[int]]) -> "WordTable":
        buckets: Dict[int, Dict[str, PostingList]] = {}
        for text in sorted(ids_by_text):
            buckets.setdefault(word_hash(text), {})[text] = compress(ids_by_text[text])
        return cls(buckets)

    def lookup(self, text: str) -> PostingList:
        bucket = self.buckets.get(word_hash(text))
        if not bucket:
            return ()
        return bucket.get(text, ())

    def __len__(self):
        return len(self.buckets)

    def texts(self) -> int:
        return sum(len(b) for b in self.buckets.values())

    def lists(self) -> Iterable[PostingList]:
        for b in self.buckets.values():
            yield from b.values()


@dataclass
class IndexTables:
    types: Dict[str, PostingList] = field(default_factory=dict)
    concepts: WordTable = field(default_factory=WordTable)
    phons: WordTable = field(default_factory=WordTable)


def build_indexes(entries: Iterable[LexicalEntry]) -> IndexTables:
    types: Dict[str, List[int]] = defaultdict(list)
    concepts: Dict[str, List[int]] = defaultdict(list)
    phons: Dict[str, List[int]] = defaultdict(list)
    for e in entries:
        types[type_key(category_of(e.graph))].append(e.id)
        c, p = concept_of(e.graph), phon_of(e.graph)
        if c is not None:
            concepts[c].append(e.id)
        if p is not None:
            phons[p].append(e.id)
    return IndexTables(
        {k: compress(v) for k, v in types.items()},
        WordTable.from_ids(concepts),
        WordTable.from_ids(phons),
    )


def lookup(table: Union[Dict[str, PostingList], WordTable], key: str) -> PostingList:
    """Zero-disk lookup in a type table (by key) or word table (by text)."""
    if isinstance(table, WordTable):
        return table.lookup(key)
    return table.get(key, ())


# -- meta index ----------------------------------------------------------------

def value_key(node: Node) -> str:
    return to_canonical_text(node)


def _members(node: Node) -> Tuple[Node, ...]:
    return node.members if isinstance(node, Disj) else (node,)


class MetaIndex:
    """(path, value) -> offsets into ``meta.dat``; reads go through a counted stream."""

    def __init__(self, paths: Sequence[Path], records: Dict[Tuple[Path, str], int],
                 unspecified: Dict[Path, int], data_size: int):
        self.paths = list(paths)
        self.records = records
        self.unspecified = unspecified
        offsets = sorted(set(records.values()) | set(unspecified.values()))
        ends = offsets[1:] + [data_size]
        self.lengths = dict(zip(offsets, (e - o for o, e in zip(offsets, ends))))
        self.stream: Optional[Stream] = None

    def __contains__(self, path: Path) -> bool:
        return path in self.unspecified

    def read(self, offset: int) -> PostingList:
        return self.read_many([offset])[0]

    def read_many(self, offsets: Sequence[int]) -> List[PostingList]:
        """Fetch several records with one read spanning from the first to the last."""
        if self.stream is None:
            raise StoreError("meta-not-open", "meta.dat is not attached")
        lo, hi = min(offsets), max(offsets)
        raw = self.stream.read_at(lo, hi + self.lengths[hi] - lo)
        return [self._parse(raw[o - lo:o - lo + self.lengths[o]], o) for o in offsets]

    @staticmethod
    def _parse(raw: bytes, offset: int) -> PostingList:
        text = raw.decode("utf-8").rstrip()
        if not text.endswith("."):
            raise StoreError("corrupt-record", f"meta.dat record at {offset}")
        try:
            return parse_postings(text[:-1])
        except ValueError as e:
            raise StoreError("corrupt-record", f"meta.dat record at {offset}: {e}") from e

    def values(self, path: Path) -> List[str]:
        return [v for p, v in self.records if p == path]

    def close(self):
        if self.stream is not None:
            self.stream.close()


def build_meta(entries: Iterable[LexicalEntry], paths: Sequence[Path]) -> Tuple[MetaIndex, bytes]:
    """Group IDs per (path, value) and per path-unspecified; serialize the lists."""
    for p in paths:
        if p in RESERVED_PATHS:
            raise ValueError(f"{format_path(p)} has its own index and cannot be meta-indexed")
    if len(set(paths)) != len(paths):
        raise ValueError("duplicate meta path")
    match: Dict[Path, Dict[str, List[int]]] = {p: defaultdict(list) for p in paths}
    unspec: Dict[Path, List[int]] = {p: [] for p in paths}
    for e in entries:
        for p in paths:
            node = meta_value(e.graph, p)
            if node is None:
                unspec[p].append(e.id)
            elif isinstance(node, (Atom, Number, Disj)):
                for m in _members(node):
                    match[p][value_key(m)].append(e.id)
    chunks: List[bytes] = []
    size = 0
    records: Dict[Tuple[Path, str], int] = {}
    unspec_off: Dict[Path, int] = {}

    def emit(ids: List[int]) -> int:
        nonlocal size
        data = (format_postings(compress(ids)) + ".\n").encode("ascii")
        chunks.append(data)
        size += len(data)
        return size - len(data)

    for p in paths:
        unspec_off[p] = emit(unspec[p])
        for value in sorted(match[p]):
            records[(p, value)] = emit(match[p][value])
    return MetaIndex(paths, records, unspec_off, size), b"".join(chunks)


def lookup_meta(m: MetaIndex, path: Path, value: Node, mode: str = STRICT) -> PostingList:
    """Match list for ``value`` at ``path``; liberal adds the unspecified list.

    One meta.dat read for the match lists (two when liberal).  A path's
    value records are stored contiguously, so the members of a
    disjunction come back from a single spanning read.
    """
    if path not in m:
        raise KeyError(f"{format_path(path)} is not meta-indexed")
    if mode not in (STRICT, LIBERAL):
        raise ValueError(f"unknown constraint mode {mode!r}")
    result: PostingList = ()
    offsets = [m.records[k] for k in ((path, value_key(v)) for v in _members(value)) if k in m.records]
    if offsets:
        for p in m.read_many(offsets):
            result = union(result, p)
    if mode == LIBERAL:
        result = union(result, m.read(m.unspecified[path]))
    return result


# -- files ---------------------------------------------------------------------

def _write_lines(path: FsPath, lines: Iterable[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for line in lines:
            f.write(line)


def write_indexes(directory: Union[str, FsPath], tables: IndexTables, meta: MetaIndex,
                  meta_data: bytes) -> None:
    d = FsPath(directory)
    _write_lines(d / TYPE_FILE, (f"{k}\t{format_postings(p)}.\n" for k, p in sorted(tables.types.items())))
    for name, table in ((CONCEPT_FILE, tables.concepts), (PHON_FILE, tables.phons)):
        _write_lines(d / name, (
            f"{h}\t{quote_atom(text)}\t{format_postings(p)}.\n"
            for h in sorted(table.buckets) for text, p in sorted(table.buckets[h].items())))
    lines = []
    for p in meta.paths:
        ptext = format_path(p)
        values = sorted(v for q, v in meta.records if q == p)
        if not values:
            lines.append(f"{ptext}{US}\t-1\t{meta.unspecified[p]}.\n")
        for v in values:
            lines.append(f"{ptext}{US}{v}\t{meta.records[(p, v)]}\t{meta.unspecified[p]}.\n")
    _write_lines(d / META_INDEX_FILE, lines)
    (d / META_DATA_FILE).write_bytes(meta_data)


def _records(path: FsPath) -> Iterable[Tuple[int, List[str]]]:
    with open(path, encoding="utf-8", newline="\n") as f:
        for n, line in enumerate(f, 1):
            if not line.endswith(".\n"):
                raise StoreError("corrupt-index", f"{path.name}:{n}: missing terminator")
            yield n, line[:-2].split("\t")


def _postings(path: FsPath, n: int, text: str) -> PostingList:
    try:
        return parse_postings(text)
    except ValueError as e:
        raise StoreError("corrupt-index", f"{path.name}:{n}: {e}") from e


def load_indexes(directory: Union[str, FsPath]) -> Tuple[IndexTables, MetaIndex]:
    d = FsPath(directory)
    for name in INDEX_FILES + (META_DATA_FILE,):
        if not (d / name).is_file():
            raise StoreError("missing-file", str(d / name))
    tables = IndexTables()
    for n, fields in _records(d / TYPE_FILE):
        if len(fields) != 2:
            raise StoreError("corrupt-index", f"{TYPE_FILE}:{n}")
        tables.types[fields[0]] = _postings(d / TYPE_FILE, n, fields[1])
    for name, table in ((CONCEPT_FILE, tables.concepts), (PHON_FILE, tables.phons)):
        for n, fields in _records(d / name):
            try:
                h, text, plist = int(fields[0]), from_canonical_text(fields[1], fresh=False), fields[2]
            except (ValueError, IndexError) as e:
                raise StoreError("corrupt-index", f"{name}:{n}: {e}") from e
            if not isinstance(text, Atom) or word_hash(text.text) != h:
                raise StoreError("corrupt-index", f"{name}:{n}: hash does not match text")
            table.buckets.setdefault(h, {})[text.text] = _postings(d / name, n, plist)
    paths: List[Path] = []
    records: Dict[Tuple[Path, str], int] = {}
    unspecified: Dict[Path, int] = {}
    for n, fields in _records(d / META_INDEX_FILE):
        try:
            key, match_off, unspec_off = fields
            ptext, value = key.split(US, 1)
            p = parse_path(ptext)
            match_off, unspec_off = int(match_off), int(unspec_off)
        except ValueError as e:
            raise StoreError("corrupt-index", f"{META_INDEX_FILE}:{n}: {e}") from e
        if p not in unspecified:
            paths.append(p)
            unspecified[p] = unspec_off
        if value:
            records[(p, value)] = match_off
    size = (d / META_DATA_FILE).stat().st_size
    if any(o >= size for o in list(records.values()) + list(unspecified.values())):
        raise StoreError("dangling-offset", f"{META_INDEX_FILE} points past the end of {META_DATA_FILE}")
    return tables, MetaIndex(paths, records, unspecified, size)


@dataclass
class Indexes:
    """Tables attached to an open store."""

    tables: IndexTables
    meta: MetaIndex

    @property
    def types(self):
        return self.tables.types

    @property
    def concepts(self):
        return self.tables.concepts

    @property
    def phons(self):
        return self.tables.phons

    def close(self):
        self.meta.close()


def attach_indexes(h: StoreHandle) -> StoreHandle:
    tables, meta = load_indexes(h.directory)
    meta.stream = Stream(h.directory / META_DATA_FILE, h.counters, "meta")
    h.indexes = Indexes(tables, meta)
    return h


def open_lexicon(directory: Union[str, FsPath]) -> StoreHandle:
    """Open the object store and load every index table."""
    h = StoreHandle(directory)
    try:
        return attach_indexes(h)
    except Exception:
        h.close()
        raise


def build_lexicon(entries: Sequence[LexicalEntry], meta_paths: Sequence[Path],
                  directory: Union[str, FsPath]) -> Dict[str, int]:
    """Write store and indexes; return the byte size of every output file."""
    d = FsPath(directory)
    build_store(entries, d)
    meta, data = build_meta(entries, meta_paths)
    write_indexes(d, build_indexes(entries), meta, data)
    names = ("lexicon.obj", "lexicon.tab") + INDEX_FILES + (META_DATA_FILE,)
    return {name: (d / name).stat().st_size for name in names}
