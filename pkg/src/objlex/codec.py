"""Canonical text codec for feature graphs.

Grammar (UTF-8)::

    atom      bare lowercase identifier, or single-quoted text
    number    optionally signed decimal integer
    var       identifier starting with an uppercase letter or underscore
    avm       [f:v, g:w]
    sequence  {v, w}
    disj      or(v, w)            members atomic
    compound  f(v, w)             functor 'or' must be quoted

A record is a term followed by ``.`` and a newline.  ``%`` starts a
comment that runs to the end of the line; comments and whitespace are
accepted on input and never produced on output.
"""

from __future__ import annotations

import itertools
import re
from functools import lru_cache
from typing import Callable, Dict, Iterator, List, Optional

from .errors import CodecError
from .featgraph import Atom, Avm, Compound, Disj, Node, Number, Seq, Var

__all__ = [
    "to_canonical_text", "from_canonical_text", "encode_record",
    "Parser", "parse_records", "quote_atom",
]

_BARE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
_FEATURE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_VARNAME = re.compile(r"[A-Z_][A-Za-z0-9_]*\Z")
_FRESH_SUFFIX = re.compile(r"_\d+\Z")

_ESCAPES = {"\\": "\\\\", "'": "\\'", "\n": "\\n", "\t": "\\t", "\r": "\\r"}
_UNESCAPES = {"\\": "\\", "'": "'", "n": "\n", "t": "\t", "r": "\r"}

_fresh_counter = itertools.count()


@lru_cache(maxsize=65536)
def quote_atom(text: str) -> str:
    if _BARE.match(text) and text != "or":
        return text
    return "'" + "".join(_ESCAPES.get(c, c) for c in text) + "'"


def _functor(text: str) -> str:
    return "'or'" if text == "or" else quote_atom(text)


@lru_cache(maxsize=4096)
def _checked(pattern: re.Pattern, name: str, what: str) -> str:
    if not pattern.match(name):
        raise ValueError(f"bad {what} name {name!r}")
    return name


def to_canonical_text(g: Node) -> str:
    parts: List[str] = []
    _emit(g, parts.append)
    return "".join(parts)


def _emit(n: Node, out: Callable[[str], None]) -> None:
    t = type(n)
    if t is Atom:
        out(quote_atom(n.text))
    elif t is Var:
        out(_checked(_VARNAME, n.name, "variable"))
    elif t is Number:
        out(str(n.value))
    elif t is Avm:
        out("[")
        for i, (f, v) in enumerate(n.pairs):
            _checked(_FEATURE, f, "feature")
            out(", " + f + ":" if i else f + ":")
            _emit(v, out)
        out("]")
    elif t is Seq:
        _emit_list("{", n.items, "}", out)
    elif t is Disj:
        _emit_list("or(", n.members, ")", out)
    elif t is Compound:
        _emit_list(_functor(n.functor) + "(", n.args, ")", out)
    else:
        raise TypeError(f"not a feature graph node: {n!r}")


def _emit_list(open_, items, close, out):
    out(open_)
    for i, v in enumerate(items):
        if i:
            out(", ")
        _emit(v, out)
    out(close)


def encode_record(g: Node) -> bytes:
    return (to_canonical_text(g) + ".\n").encode("utf-8")


# -- decoding --------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>(?:\s+|%[^\n]*)+)
  | (?P<num>-?\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<quoted>'(?:[^'\\]|\\.)*')
  | (?P<assign>:=)
  | (?P<punct>[\[\]{}(),:.])
""", re.VERBOSE)


class Parser:
    """Recursive-descent reader over one text buffer.

    ``fresh`` controls variable naming: ``None`` keeps names as written,
    otherwise it is an iterator of integers used to give every record's
    variables new, process-unique names.
    """

    def __init__(self, text: str, fresh: Optional[Iterator[int]] = None):
        self.text = text
        self.pos = 0
        self.fresh = fresh
        self._scope: Dict[str, str] = {}
        self._tok = None
        self._advance()

    # tokens are (kind, value, start)
    def _advance(self):
        text, pos = self.text, self.pos
        while True:
            if pos >= len(text):
                self._tok = ("eof", "", pos)
                self.pos = pos
                return
            m = _TOKEN.match(text, pos)
            if m is None:
                raise CodecError(pos, f"unexpected character {text[pos]!r}")
            kind = m.lastgroup
            pos = m.end()
            if kind != "ws":
                self._tok = (kind, m.group(kind), m.start())
                self.pos = pos
                return

    def _error(self, reason: str):
        raise CodecError(self._tok[2], reason)

    def _expect(self, value: str):
        kind, tok, _ = self._tok
        if kind not in ("punct", "assign") or tok != value:
            self._error(f"expected {value!r}, found {tok or 'end of input'!r}")
        self._advance()

    def _peek(self, value: str) -> bool:
        kind, tok, _ = self._tok
        return kind in ("punct", "assign") and tok == value

    def at_eof(self) -> bool:
        return self._tok[0] == "eof"

    def begin_record(self):
        self._scope = {}

    def _var(self, name: str) -> Var:
        if self.fresh is None:
            return Var(name)
        new = self._scope.get(name)
        if new is None:
            base = _FRESH_SUFFIX.sub("", name) or "_"
            new = self._scope[name] = f"{base}_{next(self.fresh)}"
        return Var(new)

    def name(self) -> str:
        """Read a bare identifier (used for record names)."""
        kind, tok, _ = self._tok
        if kind != "name":
            self._error(f"expected a name, found {tok or 'end of input'!r}")
        self._advance()
        return tok

    def term(self) -> Node:
        kind, tok, start = self._tok
        if kind == "num":
            self._advance()
            return Number(int(tok))
        if kind == "name":
            self._advance()
            if tok[0].isupper() or tok[0] == "_":
                return self._var(tok)
            if self._call_follows(start, tok):
                return self._call(tok, bare=True)
            return Atom(tok)
        if kind == "quoted":
            self._advance()
            text = re.sub(r"\\(.)", lambda m: _UNESCAPES.get(m.group(1), m.group(1)), tok[1:-1])
            if self._call_follows(start, tok):
                return self._call(text, bare=False)
            return Atom(text)
        if kind == "punct" and tok == "[":
            return self._avm()
        if kind == "punct" and tok == "{":
            self._advance()
            return Seq(tuple(self._items("}")))
        self._error(f"expected a term, found {tok or 'end of input'!r}")

    def _call_follows(self, start: int, tok: str) -> bool:
        kind, value, pos = self._tok
        return kind == "punct" and value == "(" and pos == start + len(tok)

    def _call(self, functor: str, bare: bool) -> Node:
        self._advance()  # '('
        starts: List[int] = []
        close = self._tok[2]
        args = self._items(")", starts)
        if bare and functor == "or":
            for a, pos in zip(args, starts):
                if not isinstance(a, (Atom, Number)):
                    raise CodecError(pos, "disjunction members must be atoms or numbers")
            if not args:
                raise CodecError(close, "empty disjunction")
            return Disj(tuple(args))
        return Compound(functor, tuple(args))

    def _items(self, close: str, starts: Optional[List[int]] = None) -> List[Node]:
        items: List[Node] = []
        if self._peek(close):
            self._advance()
            return items
        while True:
            if starts is not None:
                starts.append(self._tok[2])
            items.append(self.term())
            if self._peek(","):
                self._advance()
                continue
            self._expect(close)
            return items

    def _avm(self) -> Avm:
        self._advance()  # '['
        pairs = []
        if self._peek("]"):
            self._advance()
            return Avm(())
        while True:
            kind, tok, _ = self._tok
            if kind != "name":
                self._error(f"expected a feature name, found {tok or 'end of input'!r}")
            self._advance()
            self._expect(":")
            pairs.append((tok, self.term()))
            if self._peek(","):
                self._advance()
                continue
            self._expect("]")
            return Avm(tuple(pairs))

    def record(self) -> Node:
        """Read ``term .``"""
        self.begin_record()
        g = self.term()
        self._expect(".")
        return g

    def named_record(self):
        """Read ``name := term .`` and return (name, term)."""
        self.begin_record()
        name = self.name()
        self._expect(":=")
        g = self.term()
        self._expect(".")
        return name, g

    def expect_eof(self):
        if not self.at_eof():
            self._error(f"trailing input {self._tok[1]!r}")


def from_canonical_text(text: str, fresh=True) -> Node:
    """Decode one term (an optional trailing record terminator is allowed).

    ``fresh=True`` renames variables apart using a process-wide counter,
    ``fresh=False`` keeps names, and an iterator supplies its own numbers.
    """
    counter = _fresh_counter if fresh is True else (None if fresh is False else fresh)
    p = Parser(text, counter)
    p.begin_record()
    g = p.term()
    if p._peek("."):
        p._advance()
    p.expect_eof()
    return g


def parse_records(text: str, fresh=False):
    """Yield (name, term) for every ``name := term .`` record in ``text``."""
    counter = _fresh_counter if fresh is True else (None if fresh is False else fresh)
    p = Parser(text, counter)
    while not p.at_eof():
        yield p.named_record()
