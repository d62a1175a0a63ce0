"""Brute-force reference for queries: scan every entry and unify.

Nothing here touches the index code.  A meta constraint is checked by
building a graph that carries the value at the constraint's path and
unifying it with the whole entry; a strict constraint also needs the
entry to state a value at that path explicitly.
"""

from __future__ import annotations

import itertools
import random
from typing import Dict, List, Sequence

from objlex.category import category_from_term, type_key
from objlex.featgraph import (
    Atom, Avm, Disj, Node, Number, Var, flatten, is_atomic, path_get, unify,
)
from objlex.index import LIBERAL, STRICT
from objlex.query import CONCEPT, META, PHON, TYPE, Constraint
from objlex.schema import CONCEPT_PATH, PHON_PATH, TYPE_PATH

_fresh = itertools.count()


def constraint_graph(path, value: Node) -> Node:
    g = value
    for feature, occ in reversed(path):
        pad = tuple((feature, Var(f"_Pad{next(_fresh)}")) for _ in range(occ))
        g = Avm(pad + ((feature, g),))
    return g


def oracle_match(graph: Node, c: Constraint, probe: Node = None) -> bool:
    """``probe`` is the constraint graph, passed in when scanning many entries."""
    if c.target == CONCEPT:
        return path_get(graph, CONCEPT_PATH) == c.value
    if c.target == PHON:
        return path_get(graph, PHON_PATH) == c.value
    if c.target == TYPE:
        return type_key(category_from_term(path_get(graph, TYPE_PATH))) == c.value.text
    if unify(probe or constraint_graph(c.path, c.value), graph) is None:
        return False
    if c.mode == STRICT:
        node = path_get(graph, c.path)
        return node is not None and not isinstance(node, Var)
    return True


def oracle_ids(graphs: Sequence[Node], constraints: Sequence[Constraint], cache=None) -> List[int]:
    """Scan all graphs; ``cache`` (a dict) memoizes the scan per constraint."""
    if cache is None:
        return [i for i, g in enumerate(graphs) if all(oracle_match(g, c) for c in constraints)]
    sets = []
    for c in constraints:
        if c not in cache:
            probe = constraint_graph(c.path, c.value) if c.target == META else None
            cache[c] = frozenset(i for i, g in enumerate(graphs) if oracle_match(g, c, probe))
        sets.append(cache[c])
    return sorted(frozenset.intersection(*sets))


class QueryMaker:
    """Random mixed queries drawn from the values a corpus actually uses."""

    def __init__(self, graphs: Sequence[Node], indexed, unindexed, seed: int = 0):
        self.rng = random.Random(seed)
        self.paths = list(indexed) + list(unindexed)
        self.unindexed = list(unindexed)
        self.values: Dict = {p: set() for p in self.paths}
        concepts, phons, types = set(), set(), set()
        for g in graphs:
            concepts.add(path_get(g, CONCEPT_PATH).text)
            phons.add(path_get(g, PHON_PATH).text)
            types.add(type_key(category_from_term(path_get(g, TYPE_PATH))))
            for p in self.paths:
                node = path_get(g, p)
                if node is not None and is_atomic(node):
                    self.values[p].update(node.members if isinstance(node, Disj) else (node,))
        self.concepts, self.phons, self.types = sorted(concepts), sorted(phons), sorted(types)
        for p in self.paths:
            self.values[p] = sorted(self.values[p], key=repr) + [Atom("zzz"), Number(9)]

    def _meta(self, path) -> Constraint:
        pool = self.values[path]
        if self.rng.random() < 0.15 and len(pool) > 2:
            value = Disj(tuple(self.rng.sample(pool, 2)))
        else:
            value = self.rng.choice(pool)
        return Constraint(META, value, self.rng.choice([STRICT, LIBERAL]), path)

    def _dedicated(self) -> Constraint:
        kind = self.rng.choice([CONCEPT, PHON, TYPE])
        if kind == TYPE:
            return Constraint(TYPE, Atom(self.rng.choice(self.types)))
        pool = self.concepts if kind == CONCEPT else self.phons
        word = self.rng.choice(pool) if self.rng.random() < 0.95 else "zzz"
        return Constraint(kind, Atom(word))

    def query(self) -> List[Constraint]:
        out = []
        indexed = [p for p in self.paths if p not in self.unindexed]
        roll = self.rng.random()
        if roll < 0.25:
            out.append(self._dedicated())
        for _ in range(self.rng.randint(1, 3)):
            out.append(self._meta(self.rng.choice(indexed)))
        if roll < 0.10 and self.unindexed:
            # unindexed paths are checked by fetching candidates, so keep
            # them behind a dedicated constraint that narrows the candidate set
            out.append(self._meta(self.rng.choice(self.unindexed)))
        return out


def atomic_pairs(g: Node):
    return [(p, v) for p, v in flatten(g) if is_atomic(v)]
