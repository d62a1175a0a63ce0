"""Directional categories and their canonical type keys.

In a feature graph a category is stored as a term::

    n                                   basic category
    cat(np, {}, {arg(n, A)})            np/n
    cat(s, {arg(np, wh, B)}, {arg(np, J)})

Each argument is ``arg(Cat[, Mode][, Link])``: ``Cat`` is a category
atom or a nested ``cat(...)``, ``Mode`` an opaque tag (default ``0``) and
``Link`` the variable naming the argument's ARG sub-graph.  Left and
right argument lists are both in surface order.

The type key renders the result, then ``\\arg`` per left argument, then
``/arg`` per right argument; nested categories are parenthesized and
non-default modes appended as ``^tag``.  Links are per-entry variables
and do not take part in category identity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

from .featgraph import Atom, Compound, Node, Number, Seq, Var

DEFAULT_MODE = "0"
_NAME = re.compile(r"[A-Za-z0-9_]+\Z")


@dataclass(frozen=True)
class Arg:
    cat: Union[str, "Category"]
    mode: str = DEFAULT_MODE
    link: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if isinstance(self.cat, Category) and not (self.cat.left or self.cat.right):
            object.__setattr__(self, "cat", self.cat.result)
        if isinstance(self.cat, str) and not _NAME.match(self.cat):
            raise ValueError(f"bad category name {self.cat!r}")
        if not _NAME.match(self.mode):
            raise ValueError(f"bad mode tag {self.mode!r}")

    @property
    def result(self) -> str:
        return self.cat if isinstance(self.cat, str) else self.cat.result


@dataclass(frozen=True)
class Category:
    result: str
    left: Tuple[Arg, ...] = ()
    right: Tuple[Arg, ...] = ()

    def __post_init__(self):
        if not _NAME.match(self.result):
            raise ValueError(f"bad category name {self.result!r}")

    @property
    def args(self):
        """(direction, arg) pairs in surface order."""
        return [("left", a) for a in self.left] + [("right", a) for a in self.right]

    @property
    def key(self) -> str:
        return type_key(self)

    def __str__(self):
        return type_key(self)


def type_key(c: Category) -> str:
    parts = [c.result]
    parts.extend("\\" + _arg_key(a) for a in c.left)
    parts.extend("/" + _arg_key(a) for a in c.right)
    return "".join(parts)


def _arg_key(a: Arg) -> str:
    s = a.cat if isinstance(a.cat, str) else "(" + type_key(a.cat) + ")"
    return s if a.mode == DEFAULT_MODE else s + "^" + a.mode


_KEY_TOKEN = re.compile(r"[A-Za-z0-9_]+|[\\/^()]")


def parse_type_key(text: str) -> Category:
    """Inverse of :func:`type_key`; rejects non-canonical input."""
    toks = _KEY_TOKEN.findall(text)
    if "".join(toks) != text:
        raise ValueError(f"bad type key {text!r}")
    pos = 0

    def category():
        nonlocal pos
        if pos >= len(toks) or not _NAME.match(toks[pos]):
            raise ValueError(f"bad type key {text!r}")
        result = toks[pos]
        pos += 1
        left, right = [], []
        while pos < len(toks) and toks[pos] in "\\/":
            slash = toks[pos]
            if slash == "\\" and right:
                raise ValueError(f"left argument after right argument in {text!r}")
            pos += 1
            (left if slash == "\\" else right).append(argument())
        return Category(result, tuple(left), tuple(right))

    def argument():
        nonlocal pos
        if pos < len(toks) and toks[pos] == "(":
            pos += 1
            cat = category()
            if pos >= len(toks) or toks[pos] != ")":
                raise ValueError(f"unbalanced parenthesis in {text!r}")
            pos += 1
        elif pos < len(toks) and _NAME.match(toks[pos]):
            cat = toks[pos]
            pos += 1
        else:
            raise ValueError(f"bad type key {text!r}")
        mode = DEFAULT_MODE
        if pos < len(toks) and toks[pos] == "^":
            if pos + 1 >= len(toks) or not _NAME.match(toks[pos + 1]):
                raise ValueError(f"bad mode tag in {text!r}")
            mode = toks[pos + 1]
            pos += 2
        return Arg(cat, mode)

    c = category()
    if pos != len(toks) or type_key(c) != text:
        raise ValueError(f"non-canonical type key {text!r}")
    return c


# -- term conversion ---------------------------------------------------------

def _name_of(node: Node) -> Optional[str]:
    if isinstance(node, Atom):
        return node.text
    if isinstance(node, Number):
        return str(node.value)
    return None


def category_from_term(node: Node) -> Category:
    """Read a category term; raise ValueError when it is malformed."""
    # category names are atoms; numbers are accepted only as mode tags
    if isinstance(node, Atom):
        return Category(node.text)
    if not (isinstance(node, Compound) and node.functor == "cat" and len(node.args) == 3):
        raise ValueError(f"not a category term: {node!r}")
    result = node.args[0].text if isinstance(node.args[0], Atom) else None
    if result is None:
        raise ValueError(f"category result must be atomic: {node.args[0]!r}")
    sides = []
    for side in node.args[1:]:
        if not isinstance(side, Seq):
            raise ValueError("category argument lists must be sequences")
        sides.append(tuple(_arg_from_term(a) for a in side.items))
    return Category(result, sides[0], sides[1])


def _arg_from_term(node: Node) -> Arg:
    if not (isinstance(node, Compound) and node.functor == "arg" and 1 <= len(node.args) <= 3):
        raise ValueError(f"not an argument term: {node!r}")
    inner = node.args[0]
    cat = inner.text if isinstance(inner, Atom) else category_from_term(inner)
    mode, link = DEFAULT_MODE, None
    for extra in node.args[1:]:
        if isinstance(extra, Var):
            if link is not None:
                raise ValueError("argument has two links")
            link = extra.name
        elif link is None and mode == DEFAULT_MODE and _name_of(extra) is not None:
            mode = _name_of(extra)
        else:
            raise ValueError(f"bad argument decoration {extra!r}")
    return Arg(cat, mode, link)


def category_to_term(c: Category) -> Node:
    if not c.left and not c.right:
        return Atom(c.result)
    return Compound("cat", (
        Atom(c.result),
        Seq(tuple(_arg_to_term(a) for a in c.left)),
        Seq(tuple(_arg_to_term(a) for a in c.right)),
    ))


def _arg_to_term(a: Arg) -> Node:
    args = [Atom(a.cat) if isinstance(a.cat, str) else category_to_term(a.cat)]
    if a.mode != DEFAULT_MODE:
        numeric = a.mode.isdigit() and str(int(a.mode)) == a.mode
        args.append(Number(int(a.mode)) if numeric else Atom(a.mode))
    if a.link is not None:
        args.append(Var(a.link))
    return Compound("arg", tuple(args))
