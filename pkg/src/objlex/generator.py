"""Agenda-driven categorial generation.

The agenda holds an unordered list of produced heads and a stack of
arguments still to be produced.  Generation starts from one realization
of a concept.  While arguments remain, the top one is produced either by
a head already in the list or by a new lexicon entry whose category has
it as result.  When the stack is empty but the single remaining head is
not sentential, the lexicon is searched for an entry that takes that head
as an argument.  Every reduction unifies full graphs under one shared
environment, so agreement propagates.

Surface order comes from slot templates: an entry's template is its left
argument slots, its own word, then its right argument slots.  Filling a
slot splices in the filler's template, pending slots included.

The derivation log numbers records like a hand-written trace: a search
record followed by an insert or reduce record for every move.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from .category import Arg, Category, type_key
from .codec import to_canonical_text
from .errors import BudgetError, DeadEndError, GenerationError, QueryError
from .featgraph import (
    Atom, Avm, Bindings, Compound, Node, Number, Path, Seq, Var,
    flatten, format_path, is_atomic, path_get, resolve, unify,
)
from .index import STRICT
from .query import CONCEPT, META, Constraint, Query, execute, graph_to_query
from .schema import ARG, CAT, ID, SYNSEM, category_of, phon_of
from .store import LexicalEntry, StoreHandle

SENTENTIAL = ("s", "q")
CAT_PATH: Path = ((SYNSEM, 0), (CAT, 0))
NUM_PATH: Path = ((SYNSEM, 0), ("num", 0))


@dataclass(frozen=True)
class Slot:
    name: str


Template = List[Union[str, Slot]]


@dataclass
class HeadItem:
    hid: int
    category: str
    graph: Node
    phon: Template
    provenance: str = ""


@dataclass
class ArgItem:
    spec: Node
    head: int
    direction: str
    slot: str
    arg: Arg


@dataclass(frozen=True)
class LogRecord:
    n: int
    action: str
    fields: Tuple[Tuple[str, Node], ...]

    def term(self) -> Node:
        return Compound("step", (Number(self.n), Atom(self.action), Avm(self.fields)))

    def to_text(self) -> str:
        return to_canonical_text(self.term()) + "."

    def get(self, name: str) -> Optional[Node]:
        for f, v in self.fields:
            if f == name:
                return v
        return None


@dataclass
class Agenda:
    heads: List[HeadItem]
    args: List[ArgItem]
    env: Bindings
    rng: random.Random
    budget: int
    log: List[LogRecord] = field(default_factory=list)
    fresh: Iterator[int] = field(default_factory=itertools.count)
    next_hid: int = 0
    words: List[str] = field(default_factory=list)

    @property
    def terminal(self) -> bool:
        return (not self.args and len(self.heads) == 1
                and self.heads[0].category in SENTENTIAL)


@dataclass
class Sentence:
    surface: str
    graph: Node
    derivation: List[LogRecord]


# -- helpers -----------------------------------------------------------------

def render(template: Template) -> str:
    return " ".join(w if isinstance(w, str) else "_" for w in template)


def _label(cat: str, graph: Node, env: Bindings) -> str:
    num = path_get(resolve(graph, env), NUM_PATH)
    return f"{cat}_{num.text}" if isinstance(num, Atom) else cat


def _arg_spec(g: Node, link: Optional[str]) -> Optional[Tuple[int, Node]]:
    if link is None or not isinstance(g, Avm):
        return None
    for f, k, sub in g.indexed():
        if f == ARG and isinstance(sub, Avm) and sub.get(ID) == Var(link):
            return k, sub
    return None


def _log(a: Agenda, action: str, **fields: Node) -> None:
    a.log.append(LogRecord(len(a.log) + 1, action, tuple(fields.items())))


def _texts(items: Sequence[str]) -> Seq:
    return Seq(tuple(Atom(t) for t in items))


def _state(a: Agenda) -> Dict[str, Node]:
    return {
        "heads": _texts([_label(h.category, h.graph, a.env) for h in a.heads]),
        "args": _texts([_label(x.arg.result, x.spec, a.env) for x in a.args]),
    }


def _bound(before: Node, after: Node) -> Seq:
    """Paths that held an unbound variable before a reduction and a value after it."""
    now = dict(flatten(after))
    out = []
    for path, value in flatten(before):
        if isinstance(value, Var) and is_atomic(now.get(path, value)):
            out.append(Compound("bind", (Atom(format_path(path)), now[path])))
    return Seq(tuple(out))


def _entry_head(a: Agenda, entry: LexicalEntry, note: str) -> Tuple[HeadItem, List[ArgItem]]:
    cat = category_of(entry.graph)
    hid = a.next_hid
    a.next_hid += 1
    slots = []
    args = []
    for direction, arg in cat.args:
        found = _arg_spec(entry.graph, arg.link)
        if found is None:
            raise GenerationError(f"entry {entry.id}: argument {arg} has no linked ARG")
        slots.append(Slot(arg.link))
        args.append(ArgItem(found[1], hid, direction, arg.link, arg))
    left = slots[: len(cat.left)]
    right = slots[len(cat.left):]
    template: Template = left + [phon_of(entry.graph)] + right
    return HeadItem(hid, cat.result, entry.graph, template, note), args


def _category_fits(arg: Arg, cat: Category) -> bool:
    if isinstance(arg.cat, str):
        return cat.result == arg.cat
    return type_key(cat) == type_key(arg.cat)


def _indexed_query(h: StoreHandle, g: Node, anchor: Path, graph: Node) -> Query:
    """Constraints on indexed paths only, with the category constraint strict."""
    meta = h.indexes.meta
    out = []
    for c in graph_to_query(g, anchor).constraints:
        if c.target != META:
            out.append(c)
        elif c.path == anchor + CAT_PATH:
            out.append(Constraint(META, c.value, STRICT, c.path))
        elif c.path in meta:
            out.append(c)
    return Query(tuple(out), graph, anchor)


def _arg_positions(h: StoreHandle) -> List[int]:
    ks = sorted({p[0][1] for p in h.indexes.meta.paths if p[0][0] == ARG})
    return ks or [0, 1, 2, 3]


def _find_slot(a: Agenda, slot: str) -> HeadItem:
    for head in a.heads:
        if Slot(slot) in head.phon:
            return head
    raise GenerationError(f"slot {slot} is not pending in any head")


def _splice(template: Template, slot: str, filler: Template) -> Template:
    i = template.index(Slot(slot))
    return template[:i] + list(filler) + template[i + 1:]


def _fail(a: Agenda, error, message: str):
    raise error(message, a.log)


def _choose(a: Agenda, valid: list, message: str, **fields: Node):
    """Log the search, then pick one verified candidate (entry first in each tuple)."""
    fields["candidates"] = Seq(tuple(Number(c[0].id) for c in valid))
    if not valid:
        _log(a, "search", **fields)
        _fail(a, DeadEndError, message)
    choice = a.rng.choice(valid)
    entry = choice[0]
    _log(a, "search", **fields, chosen=Number(entry.id), word=Atom(phon_of(entry.graph)),
         cat=Atom(type_key(category_of(entry.graph))))
    return choice


# -- operations ----------------------------------------------------------------

def start(h: StoreHandle, concept: Optional[str], seed: int = 0, budget: int = 32) -> Agenda:
    """Fetch one realization of ``concept`` (random when None) and open the agenda."""
    if h.n == 0:
        raise GenerationError("empty-lexicon")
    if h.indexes is None:
        raise GenerationError("indexes are not attached to this store")
    rng = random.Random(seed)
    a = Agenda([], [], {}, rng, budget)
    if concept is None:
        texts = sorted(t for b in h.indexes.concepts.buckets.values() for t in b)
        concept = rng.choice(texts)
    ids = execute(h, Query((Constraint(CONCEPT, Atom(concept)),)))
    if not ids:
        raise GenerationError(f"unknown-concept: {concept}")
    oid = rng.choice(ids)
    entry = h.get_object(oid, fresh=a.fresh)
    head, args = _entry_head(a, entry, f"concept {concept}")
    _log(a, "search", concept=Atom(concept), candidates=Seq(tuple(Number(i) for i in ids)),
         chosen=Number(oid), word=Atom(phon_of(entry.graph)), cat=Atom(type_key(category_of(entry.graph))))
    a.heads.append(head)
    a.args.extend(args)
    a.words.append(phon_of(entry.graph))
    _log(a, "insert", head=Atom(_label(head.category, head.graph, a.env)),
         phrase=Atom(render(head.phon)), **_state(a))
    return a


def _produce_arg(h: StoreHandle, a: Agenda) -> None:
    top = a.args.pop()
    owner = _find_slot(a, top.slot)
    label = _label(top.arg.result, top.spec, a.env)
    spec = resolve(top.spec, a.env)
    before = resolve(owner.graph, a.env)

    existing = []
    for head in a.heads:
        if head is owner or head.category != top.arg.result:
            continue
        env = unify(top.spec, head.graph, a.env)
        if env is not None:
            existing.append((head, env))
    if existing:
        head, env = a.rng.choice(existing)
        _log(a, "search", arg=Atom(label), source=Atom("heads"), chosen=Atom(_label(head.category, head.graph, a.env)))
        a.env = env
        a.heads.remove(head)
        owner.phon = _splice(owner.phon, top.slot, head.phon)
        for x in a.args:
            if x.head == head.hid:
                x.head = owner.hid
        _log(a, "reduce", arg=Atom(label), dominator=Atom(owner.category),
             phrase=Atom(render(owner.phon)), bound=_bound(before, resolve(owner.graph, a.env)), **_state(a))
        return

    try:
        q = _indexed_query(h, spec, (), spec)
    except QueryError as e:
        _fail(a, DeadEndError, f"dead-end: cannot query for argument {label}: {e}")
    ids = execute(h, q)
    valid = []
    for oid in ids:
        entry = h.get_object(oid, fresh=a.fresh)
        if not _category_fits(top.arg, category_of(entry.graph)):
            continue
        env = unify(top.spec, entry.graph, a.env)
        if env is not None:
            valid.append((entry, env))
    entry, env = _choose(a, valid, f"dead-end: no entry produces argument {label}",
                         arg=Atom(label), query=_texts([str(c) for c in q.constraints]))
    a.env = env
    new, new_args = _entry_head(a, entry, f"argument {label}")
    owner.phon = _splice(owner.phon, top.slot, new.phon)
    for x in new_args:
        x.head = owner.hid
    a.args.extend(new_args)
    a.words.append(phon_of(entry.graph))
    _log(a, "reduce", arg=Atom(label), dominator=Atom(owner.category),
         phrase=Atom(render(owner.phon)), bound=_bound(before, resolve(owner.graph, a.env)), **_state(a))


def _attach_head(h: StoreHandle, a: Agenda) -> None:
    pending = [x for x in a.heads if x.category not in SENTENTIAL]
    if len(pending) != 1 or len(a.heads) != 1:
        raise GenerationError(f"expected exactly one head, found {len(a.heads)}")
    head = pending[0]
    label = _label(head.category, head.graph, a.env)
    syn = path_get(resolve(head.graph, a.env), ((SYNSEM, 0),))
    if syn is None:
        _fail(a, DeadEndError, f"dead-end: head {label} has no synsem to search on")
    probe = Avm(((SYNSEM, syn),))
    valid = []
    queries = []
    for k in _arg_positions(h):
        anchor = ((ARG, k),)
        q = _indexed_query(h, probe, anchor, head.graph)
        queries.append(f"{format_path(anchor)}: " + " ".join(map(str, q.constraints)))
        for oid in execute(h, q):
            entry = h.get_object(oid, fresh=a.fresh)
            cat = category_of(entry.graph)
            sub = path_get(entry.graph, anchor)
            link = sub.get(ID) if isinstance(sub, Avm) else None
            arg = next((x for _, x in cat.args if isinstance(link, Var) and x.link == link.name), None)
            if arg is None or not _category_fits(arg, Category(head.category)):
                continue
            env = unify(head.graph, sub, a.env)
            if env is not None:
                valid.append((entry, arg, env))
    entry, arg, env = _choose(a, valid, f"dead-end: no entry takes {label} as an argument",
                              head=Atom(label), query=_texts(queries))
    before = resolve(entry.graph, a.env)
    a.env = env
    new, new_args = _entry_head(a, entry, f"takes {label}")
    new.phon = _splice(new.phon, arg.link, head.phon)
    a.heads.remove(head)
    a.heads.append(new)
    a.args.extend(x for x in new_args if x.slot != arg.link)
    a.words.append(phon_of(entry.graph))
    _log(a, "reduce", arg=Atom(_label(arg.result, head.graph, a.env)), head=Atom(_label(new.category, new.graph, a.env)),
         phrase=Atom(render(new.phon)), bound=_bound(before, resolve(new.graph, a.env)), **_state(a))


def step(h: StoreHandle, a: Agenda) -> Agenda:
    """Make one move; the agenda is updated in place and returned."""
    if a.terminal:
        raise GenerationError("agenda is already terminal")
    if a.budget <= 0:
        _fail(a, BudgetError, "budget exhausted")
    a.budget -= 1
    if a.args:
        _produce_arg(h, a)
    else:
        _attach_head(h, a)
    return a


def generate(h: StoreHandle, concept: Optional[str] = None, seed: int = 0, budget: int = 32) -> Sentence:
    if budget < 1:
        raise ValueError("budget must be at least 1")
    a = start(h, concept, seed, budget)
    while not a.terminal:
        step(h, a)
    head = a.heads[0]
    return Sentence(render(head.phon), resolve(head.graph, a.env), a.log)
