"""Where the indexed features live inside a lexical entry."""

from __future__ import annotations

from typing import Optional

from .category import Category, category_from_term
from .featgraph import Atom, Avm, Node, Path, Var, path_get

CONCEPT_PATH: Path = (("head", 0), ("concept", 0))
PHON_PATH: Path = (("phon", 0),)
TYPE_PATH: Path = (("type", 0),)
ARG = "arg"
ID = "id"
SYNSEM = "synsem"
CAT = "cat"

RESERVED_PATHS = {CONCEPT_PATH: "concept", PHON_PATH: "phon", TYPE_PATH: "type"}

# returned by meta_value when a non-AVM value sits part way along the path
BLOCKED = object()


def meta_value(g: Node, path: Path):
    """The value an entry specifies at ``path`` for meta indexing.

    ``None`` means unspecified (missing feature or unbound variable on the
    way).  :data:`BLOCKED` means a non-AVM value cuts the path short, so no
    value there can ever unify.
    """
    node = g
    for feature, occ in path:
        if type(node) is Var:
            return None
        if type(node) is not Avm:
            return BLOCKED
        node = node.get(feature, occ)
        if node is None:
            return None
    return None if type(node) is Var else node


def atom_at(g: Node, path: Path) -> Optional[str]:
    node = path_get(g, path)
    return node.text if isinstance(node, Atom) else None


def concept_of(g: Node) -> Optional[str]:
    return atom_at(g, CONCEPT_PATH)


def phon_of(g: Node) -> Optional[str]:
    return atom_at(g, PHON_PATH)


def category_of(g: Node) -> Category:
    node = path_get(g, TYPE_PATH)
    if node is None:
        raise ValueError("entry has no type")
    return category_from_term(node)
