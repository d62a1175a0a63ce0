"""Constraint queries over an indexed store.

A query is a list of constraints, each resolved to a posting list by an
index lookup; the lists are intersected smallest-first.  Concept, type
and phon constraints cost no disk access.  Meta constraints cost one
``meta.dat`` read when strict and two when liberal.  A constraint on a
path that was not meta-indexed at build time is checked by fetching the
surviving candidates instead (counted as a fallback scan).

Index filtering may over-approximate; :func:`fetch_verified` unifies the
query graph with each fetched entry and keeps only the ones that unify.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .category import category_from_term, parse_type_key, type_key
from .codec import from_canonical_text, to_canonical_text
from .errors import CodecError, QueryError
from .featgraph import (
    Atom, Bindings, Node, Path, Var, flatten, format_path,
    is_atomic, parse_path, path_get, unify,
)
from .index import LIBERAL, STRICT, lookup, lookup_meta
from .postings import decompress, intersect_all
from .schema import BLOCKED, CONCEPT_PATH, PHON_PATH, TYPE_PATH, atom_at, category_of, meta_value
from .store import LexicalEntry, StoreHandle

CONCEPT, TYPE, PHON, META = "concept", "type", "phon", "meta"
_DEDICATED = {CONCEPT_PATH: CONCEPT, PHON_PATH: PHON, TYPE_PATH: TYPE}


@dataclass(frozen=True)
class Constraint:
    target: str
    value: Node
    mode: str = STRICT
    path: Optional[Path] = None

    def __post_init__(self):
        if self.target not in (CONCEPT, TYPE, PHON, META):
            raise ValueError(f"unknown constraint target {self.target!r}")
        if self.target == META:
            if not self.path:
                raise ValueError("meta constraints need a path")
            if not is_atomic(self.value):
                raise ValueError("meta constraint values must be atoms, numbers or disjunctions")
        else:
            if self.mode != STRICT:
                raise ValueError(f"{self.target} constraints are always strict")
            if not isinstance(self.value, Atom):
                raise ValueError(f"{self.target} constraint value must be an atom")

    def __str__(self):
        name = format_path(self.path) if self.target == META else self.target
        value = self.value.text if self.target == TYPE else to_canonical_text(self.value)
        return f"{'~' if self.mode == LIBERAL else ''}{name}={value}"


@dataclass(frozen=True)
class Query:
    constraints: Tuple[Constraint, ...]
    graph: Optional[Node] = None
    anchor: Path = ()

    def __post_init__(self):
        if not self.constraints:
            raise QueryError("empty-query")


def graph_to_query(g: Node, anchor: Path = ()) -> Query:
    """Flatten ``g`` into constraints on entries whose ``anchor`` sub-graph must unify with it."""
    out: List[Constraint] = []
    for rel, value in flatten(g):
        path = anchor + rel
        if isinstance(value, Var):
            continue
        target = _DEDICATED.get(path)
        if target == TYPE:
            try:
                out.append(Constraint(TYPE, Atom(type_key(category_from_term(value)))))
            except ValueError:
                pass
        elif target is not None:
            if isinstance(value, Atom):
                out.append(Constraint(target, value))
        elif is_atomic(value):
            out.append(Constraint(META, value, LIBERAL, path))
    if not out:
        raise QueryError("empty-query")
    return Query(tuple(out), g, anchor)


def matches(g: Node, c: Constraint) -> bool:
    """Check one constraint directly against an entry graph."""
    if c.target == TYPE:
        try:
            return type_key(category_of(g)) == c.value.text
        except ValueError:
            return False
    if c.target in (CONCEPT, PHON):
        return atom_at(g, CONCEPT_PATH if c.target == CONCEPT else PHON_PATH) == c.value.text
    node = meta_value(g, c.path)
    if node is None:
        return c.mode == LIBERAL
    return node is not BLOCKED and is_atomic(node) and unify(node, c.value) is not None


def _resolve(h: StoreHandle, c: Constraint):
    ix = h.indexes
    if c.target == TYPE:
        return lookup(ix.types, c.value.text)
    if c.target == CONCEPT:
        return lookup(ix.concepts, c.value.text)
    if c.target == PHON:
        return lookup(ix.phons, c.value.text)
    if c.path in ix.meta:
        return lookup_meta(ix.meta, c.path, c.value, c.mode)
    return None


def execute(h: StoreHandle, q: Query) -> List[int]:
    """Sorted IDs of entries satisfying every constraint of ``q``."""
    if h.indexes is None:
        raise QueryError("indexes are not attached to this store")
    lists = []
    unindexed = []
    for c in q.constraints:
        p = _resolve(h, c)
        if p is None:
            unindexed.append(c)
        else:
            lists.append(p)
    ids = decompress(intersect_all(lists)) if lists else list(range(h.n))
    if unindexed and ids:
        h.counters.add(fallback_scans=1)
        ids = [i for i in ids if all(matches(h.get_object(i).graph, c) for c in unindexed)]
    return ids


def fetch_verified(h: StoreHandle, q: Query, ids: Iterable[int], env: Optional[Bindings] = None,
                   fresh=True) -> List[Tuple[int, LexicalEntry, Bindings]]:
    """Load each candidate and keep those whose anchor sub-graph unifies with ``q.graph``."""
    out = []
    for oid in ids:
        entry = h.get_object(oid, fresh=fresh)
        if q.graph is None:
            out.append((oid, entry, dict(env or {})))
            continue
        target = path_get(entry.graph, q.anchor) if q.anchor else entry.graph
        if target is None:
            continue
        b = unify(q.graph, target, env)
        if b is not None:
            out.append((oid, entry, b))
    return out


# -- command-line expressions --------------------------------------------------

def resolve_field(field: str, indexed: Sequence[Path]) -> Path:
    """An unqualified feature name means the shortest indexed path ending in it."""
    if "." in field or "@" in field:
        return parse_path(field)
    hits = [p for p in indexed if p[-1][0] == field]
    if hits:
        return min(hits, key=lambda p: (len(p), format_path(p)))
    return parse_path(field)


def _word(text: str) -> Atom:
    if text.startswith("'"):
        node = from_canonical_text(text, fresh=False)
        if isinstance(node, Atom):
            return node
    return Atom(text)


def parse_expression(tokens: Sequence[str], indexed: Sequence[Path] = ()) -> Query:
    """Parse ``field=value`` / ``~field=value`` tokens into a query."""
    out = []
    for tok in tokens:
        liberal = tok.startswith("~")
        body = tok[1:] if liberal else tok
        field, sep, value = body.partition("=")
        if not sep or not field or not value:
            raise QueryError(f"bad constraint {tok!r}: expected field=value")
        mode = LIBERAL if liberal else STRICT
        try:
            if field in (CONCEPT, PHON, TYPE):
                if liberal:
                    raise QueryError(f"{field} constraints are always strict")
                if field == TYPE:
                    try:
                        value = type_key(parse_type_key(value))
                    except ValueError:
                        pass
                    out.append(Constraint(TYPE, Atom(value)))
                else:
                    out.append(Constraint(field, _word(value)))
                continue
            node = from_canonical_text(value, fresh=False)
            if isinstance(node, Var):
                raise QueryError(f"bad constraint {tok!r}: a variable constrains nothing")
            out.append(Constraint(META, node, mode, resolve_field(field, indexed)))
        except (CodecError, ValueError) as e:
            raise QueryError(f"bad constraint {tok!r}: {e}") from e
    return Query(tuple(out))
