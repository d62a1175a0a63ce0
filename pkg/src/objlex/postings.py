"""Range-compressed posting lists.

A posting list is a tuple of :class:`Span` items, sorted, non-overlapping
and non-adjacent.  A span covering one ID renders as ``s``; a longer one
as ``s+d`` for the inclusive range ``s..s+d``.
"""

from __future__ import annotations

import re
from typing import Iterable, List, NamedTuple, Sequence, Tuple


class Span(NamedTuple):
    lo: int
    hi: int  # inclusive

    def __str__(self):
        return str(self.lo) if self.lo == self.hi else f"{self.lo}+{self.hi - self.lo}"


PostingList = Tuple[Span, ...]


def compress(ids: Sequence[int]) -> PostingList:
    """Group a strictly increasing ID sequence into maximal ranges."""
    out: List[Span] = []
    lo = hi = None
    for i in ids:
        if hi is not None and i <= hi:
            raise ValueError(f"IDs must be strictly increasing ({i} after {hi})")
        if hi is not None and i == hi + 1:
            hi = i
            continue
        if lo is not None:
            out.append(Span(lo, hi))
        lo = hi = i
    if lo is not None:
        out.append(Span(lo, hi))
    return tuple(out)


def decompress(p: PostingList) -> List[int]:
    out: List[int] = []
    for lo, hi in p:
        out.extend(range(lo, hi + 1))
    return out


def cardinality(p: PostingList) -> int:
    return sum(hi - lo + 1 for lo, hi in p)


def intersect(a: PostingList, b: PostingList) -> PostingList:
    """One merge pass over the spans of both lists."""
    out: List[Span] = []
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i].lo, b[j].lo)
        hi = min(a[i].hi, b[j].hi)
        if lo <= hi:
            out.append(Span(lo, hi))
        if a[i].hi < b[j].hi:
            i += 1
        else:
            j += 1
    return tuple(out)


def union(a: PostingList, b: PostingList) -> PostingList:
    out: List[Span] = []
    i = j = 0
    while i < len(a) or j < len(b):
        if j >= len(b) or (i < len(a) and a[i].lo <= b[j].lo):
            s = a[i]
            i += 1
        else:
            s = b[j]
            j += 1
        if out and s.lo <= out[-1].hi + 1:
            if s.hi > out[-1].hi:
                out[-1] = Span(out[-1].lo, s.hi)
        else:
            out.append(s)
    return tuple(out)


def intersect_all(lists: Iterable[PostingList]) -> PostingList:
    """Intersect smallest-first, stopping as soon as the result is empty."""
    ordered = sorted(lists, key=cardinality)
    if not ordered:
        raise ValueError("nothing to intersect")
    acc = ordered[0]
    for p in ordered[1:]:
        if not acc:
            break
        acc = intersect(acc, p)
    return acc


def is_maximal(p: PostingList) -> bool:
    return all(lo <= hi for lo, hi in p) and all(
        a.hi + 1 < b.lo for a, b in zip(p, p[1:]))


def format_postings(p: PostingList) -> str:
    return "[" + ", ".join(map(str, p)) + "]"


_ITEM = re.compile(r"\s*(\d+)(?:\+(\d+))?\s*\Z")


def parse_postings(text: str) -> PostingList:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ValueError(f"bad posting list {text!r}")
    body = text[1:-1].strip()
    if not body:
        return ()
    out = []
    for item in body.split(","):
        m = _ITEM.match(item)
        if not m:
            raise ValueError(f"bad posting item {item!r}")
        lo = int(m.group(1))
        d = int(m.group(2)) if m.group(2) else 0
        if m.group(2) and d < 1:
            raise ValueError(f"range width must be at least 1: {item!r}")
        out.append(Span(lo, lo + d))
    p = tuple(out)
    if not is_maximal(p):
        raise ValueError(f"posting list not sorted and maximal: {text!r}")
    return p
