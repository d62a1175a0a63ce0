"""Off-line lexicon compiler.

Templates are underspecified graphs; a lemma names one or more parent
templates and a difference list; inflection rules turn a lemma into its
marked instances.  :func:`compile_lexicon` runs the whole pipeline and
returns entries sorted by type key (then phon, then concept) with IDs
assigned in that final order.

Source files use the canonical text grammar, one ``name := term .``
record each::

    transitive := [head:[concept:C], phon:P, type:cat(s, {arg(np, S)}, {arg(np, O)}), ...].
    ontdek := lemma(transitive, {set('head.concept', discover), set(phon, ontdek)}).
    pres_sg := rule([synsem:[cat:s]], {set('synsem.num', sing)}, {suffix(t)}).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from .category import type_key
from .codec import parse_records, to_canonical_text
from .errors import CodecError, CompileError, EditError
from .featgraph import (
    Atom, Avm, Compound, Node, Path, Seq, Var, _occurs, _unify, _walk,
    format_path, parse_path, path_get, rename_vars, resolve, unify, variables,
)
from .schema import ARG, CONCEPT_PATH, PHON_PATH, TYPE_PATH, category_of, concept_of, phon_of
from .store import LexicalEntry


@dataclass(frozen=True)
class Template:
    name: str
    graph: Node


@dataclass(frozen=True)
class Override:
    path: Path
    node: Node


@dataclass(frozen=True)
class Add:
    path: Path
    node: Node


@dataclass(frozen=True)
class Delete:
    path: Path


Edit = Union[Override, Add, Delete]
DifferenceList = Tuple[Edit, ...]


@dataclass(frozen=True)
class LemmaSpec:
    id: str
    parents: Tuple[str, ...]
    diffs: DifferenceList = ()


@dataclass(frozen=True)
class SurfaceEdit:
    op: str  # suffix | strip | replace
    args: Tuple[str, ...]

    def apply(self, word: str) -> str:
        if self.op == "suffix":
            return word + self.args[0]
        if self.op == "strip":
            if not word.endswith(self.args[0]):
                raise EditError(f"cannot strip {self.args[0]!r} from {word!r}")
            return word[: len(word) - len(self.args[0])]
        if self.op == "replace":
            old, new = self.args
            if old not in word:
                raise EditError(f"{old!r} does not occur in {word!r}")
            return word.replace(old, new)
        raise EditError(f"unknown surface operation {self.op!r}")


@dataclass(frozen=True)
class InflectionRule:
    name: str
    guard: Node
    edits: DifferenceList = ()
    surface: Tuple[SurfaceEdit, ...] = ()


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str = ""

    def __str__(self):
        return f"{self.code}({self.detail})" if self.detail else self.code


# -- variable hygiene --------------------------------------------------------

_SUFFIX = re.compile(r"_\d+\Z")


def _base(name: str) -> str:
    return _SUFFIX.sub("", name) or "_"


class _Renamer:
    """One variable scope renamed apart with a shared counter."""

    def __init__(self, counter: Iterator[int]):
        self.counter = counter
        self.names: Dict[str, str] = {}

    def __call__(self, name: str) -> str:
        new = self.names.get(name)
        if new is None:
            new = self.names[name] = f"{_base(name)}_{next(self.counter)}"
        return new

    def graph(self, g: Node) -> Node:
        return rename_vars(g, self)

    def edits(self, edits: DifferenceList) -> DifferenceList:
        return tuple(_map_edit(e, self.graph) for e in edits)


def _map_edit(e: Edit, fn) -> Edit:
    if isinstance(e, Override):
        return Override(e.path, fn(e.node))
    if isinstance(e, Add):
        return Add(e.path, fn(e.node))
    return e


def tidy_vars(g: Node) -> Node:
    """Give variables short readable names (freshening suffixes removed)."""
    mapping: Dict[str, str] = {}
    taken = set()
    for v in variables(g):
        if v.name in mapping:
            continue
        base = _base(v.name)
        name, k = base, 2
        while name in taken:
            name = f"{base}{k}"
            k += 1
        taken.add(name)
        mapping[v.name] = name
    return rename_vars(g, mapping)


# -- edits ---------------------------------------------------------------------

_DELETE = object()


def _update(node: Optional[Node], path: Path, leaf, create: bool, full: Path) -> Node:
    if not path:
        return leaf(node)
    (feature, occ), rest = path[0], path[1:]
    if node is None or isinstance(node, Var):
        if not create:
            raise EditError(f"no path {format_path(full)}")
        node = Avm(())
    if not isinstance(node, Avm):
        raise EditError(f"cannot descend into non-AVM value at {format_path(full)}")
    pairs = list(node.pairs)
    index = None
    seen = 0
    for i, (f, _) in enumerate(pairs):
        if f == feature:
            if seen == occ:
                index = i
                break
            seen += 1
    if index is None:
        if not create or occ != seen:
            raise EditError(f"no path {format_path(full)}")
        pairs.append((feature, _update(None, rest, leaf, create, full)))
    else:
        new = _update(pairs[index][1], rest, leaf, create, full)
        if new is _DELETE:
            del pairs[index]
        else:
            pairs[index] = (feature, new)
    return Avm(tuple(pairs))


def apply_edit(g: Node, edit: Edit) -> Node:
    if isinstance(edit, Override):
        old = path_get(g, edit.path)
        if isinstance(old, Var):
            # keep co-indexation: every occurrence of the variable gets the value
            if _occurs(old.name, edit.node, {}):
                raise EditError(f"cyclic override at {format_path(edit.path)}")
            return resolve(g, {old.name: edit.node})
        return _update(g, edit.path, lambda _: edit.node, True, edit.path)
    if isinstance(edit, Add):
        parent, (feature, _) = edit.path[:-1], edit.path[-1]

        def append(node):
            if node is None or isinstance(node, Var):
                node = Avm(())
            if not isinstance(node, Avm):
                raise EditError(f"cannot add under non-AVM value at {format_path(edit.path)}")
            return Avm(node.pairs + ((feature, edit.node),))

        return _update(g, parent, append, True, edit.path)
    if isinstance(edit, Delete):
        def drop(node):
            if node is None:
                raise EditError(f"no path {format_path(edit.path)}")
            return _DELETE

        return _update(g, edit.path, drop, False, edit.path)
    raise TypeError(f"not an edit: {edit!r}")


def apply_edits(g: Node, edits: Iterable[Edit]) -> Node:
    for e in edits:
        g = apply_edit(g, e)
    return g


# -- inheritance -------------------------------------------------------------

def _merge(a: Node, b: Node, env: dict) -> Node:
    """Unify where possible; on a conflict the right-hand value wins."""
    wa, _ = _walk(a, env)
    wb, _ = _walk(b, env)
    if isinstance(wa, Avm) and isinstance(wb, Avm):
        bmap = {(f, o): v for f, o, v in wb.indexed()}
        used = set()
        out = []
        for f, o, v in wa.indexed():
            if (f, o) in bmap:
                used.add((f, o))
                out.append((f, _merge(v, bmap[(f, o)], env)))
            else:
                out.append((f, v))
        out.extend((f, v) for f, o, v in wb.indexed() if (f, o) not in used)
        return Avm(tuple(out))
    trial = dict(env)
    merged = _unify(a, b, trial)
    if merged is not None:
        env.clear()
        env.update(trial)
        return merged
    return wb


def inherit(parents: Sequence[Template], diffs: DifferenceList = (),
            counter: Optional[Iterator[int]] = None) -> Node:
    """Merge parents left to right, then apply the difference list."""
    if not parents:
        raise ValueError("a lemma needs at least one parent template")
    counter = counter if counter is not None else itertools.count()
    env: dict = {}
    g = _Renamer(counter).graph(parents[0].graph)
    for t in parents[1:]:
        g = _merge(g, _Renamer(counter).graph(t.graph), env)
    g = resolve(g, env)
    return apply_edits(g, _Renamer(counter).edits(diffs))


def _expand(lemma: Node, rules: Sequence[InflectionRule], counter) -> List[Tuple[str, Node]]:
    out = []
    for rule in rules:
        scope = _Renamer(counter)
        env = unify(scope.graph(rule.guard), lemma)
        if env is None:
            continue
        g = resolve(lemma, env)
        edits = tuple(_map_edit(e, lambda n: resolve(n, env)) for e in scope.edits(rule.edits))
        try:
            g = apply_edits(g, edits)
            if rule.surface:
                word = phon_of(g)
                if word is None:
                    raise EditError("surface transform needs a PHON atom")
                for s in rule.surface:
                    word = s.apply(word)
                g = apply_edit(g, Override(PHON_PATH, Atom(word)))
        except EditError as e:
            raise EditError(f"rule {rule.name}: {e}") from e
        out.append((rule.name, g))
    return out


def expand(lemma: Node, rules: Sequence[InflectionRule]) -> List[Node]:
    """One graph per rule whose guard unifies with the lemma, in rule order."""
    return [g for _, g in _expand(lemma, rules, itertools.count())]


# -- validation ----------------------------------------------------------------

class _Cycle(Exception):
    pass


def _var_counts(g: Node) -> Dict[str, int]:
    """Occurrences per variable name; raises _Cycle if a node contains itself.

    Nodes are immutable, so a cycle can only come from tampering; the
    check rides along with the variable count at no extra traversal.
    """
    counts: Dict[str, int] = {}
    active = set()

    def walk(n):
        t = type(n)
        if t is Var:
            counts[n.name] = counts.get(n.name, 0) + 1
            return
        if t is Avm:
            children = [v for _, v in n.pairs]
        elif t is Seq:
            children = n.items
        elif t is Compound:
            children = n.args
        else:
            return
        if id(n) in active:
            raise _Cycle
        active.add(id(n))
        for c in children:
            walk(c)
        active.discard(id(n))

    walk(g)
    return counts


def validate(g: Node) -> List[Violation]:
    """Return every well-formedness violation; an empty list means valid."""
    problems: List[Violation] = []
    try:
        counts = _var_counts(g)
    except (_Cycle, RecursionError):
        return [Violation("cyclic")]
    for path in (CONCEPT_PATH, PHON_PATH):
        node = path_get(g, path)
        name = ".".join(f for f, _ in path)
        if node is None:
            problems.append(Violation("missing-feature", name))
        elif not isinstance(node, Atom):
            problems.append(Violation("non-atomic", name))
    if path_get(g, TYPE_PATH) is None:
        problems.append(Violation("missing-feature", "type"))
    else:
        try:
            category_of(g)
        except ValueError:
            problems.append(Violation("malformed-type"))
    if isinstance(g, Avm):
        for f, sub in g.pairs:
            if f != ARG:
                continue
            for name, k in _var_counts(sub).items():
                if not name.startswith("_") and counts[name] == k:
                    problems.append(Violation("unlinked-var", name))
    return problems


# -- compilation ---------------------------------------------------------------

def sort_key(g: Node) -> Tuple[str, str, str]:
    return type_key(category_of(g)), phon_of(g) or "", concept_of(g) or ""


def compile_lexicon(templates: Sequence[Template], lemmas: Sequence[LemmaSpec],
                    rules: Sequence[InflectionRule]) -> List[LexicalEntry]:
    """Inherit, expand and validate every lemma; sort; assign IDs."""
    problems: List[str] = []
    tmap: Dict[str, Template] = {}
    for t in templates:
        if t.name in tmap:
            problems.append(f"template {t.name}: defined twice")
        tmap[t.name] = t
    counter = itertools.count()
    graphs: List[Node] = []
    for lemma in lemmas:
        missing = [p for p in lemma.parents if p not in tmap]
        if missing or not lemma.parents:
            problems.append(f"lemma {lemma.id}: unknown parent template(s) {', '.join(missing) or '(none)'}")
            continue
        try:
            base = inherit([tmap[p] for p in lemma.parents], lemma.diffs, counter)
            forms = _expand(base, rules, counter) or [(None, base)]
        except EditError as e:
            problems.append(f"lemma {lemma.id}: {e}")
            continue
        for rule, g in forms:
            g = tidy_vars(g)
            violations = validate(g)
            if violations:
                where = f"lemma {lemma.id}" + (f", rule {rule}" if rule else "")
                problems.append(f"{where}: {', '.join(map(str, violations))}")
            else:
                graphs.append(g)
    if problems:
        raise CompileError(problems)
    keyed = sorted(((sort_key(g), g) for g in graphs), key=lambda kg: kg[0])
    return [LexicalEntry(i, g) for i, (_, g) in enumerate(keyed)]


# -- source files ----------------------------------------------------------------

def _location(text: str, pos: int) -> str:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return f"{line}:{col}"


def _records(text: str, source: str) -> List[Tuple[str, Node]]:
    try:
        return list(parse_records(text))
    except CodecError as e:
        raise CompileError([f"{source}:{_location(text, e.pos)}: {e.reason}"]) from e


def _path_of(node: Node) -> Path:
    if not isinstance(node, Atom):
        raise ValueError(f"path must be an atom, got {node!r}")
    return parse_path(node.text)


def _edit_from_term(node: Node) -> Edit:
    if isinstance(node, Compound):
        if node.functor == "set" and len(node.args) == 2:
            return Override(_path_of(node.args[0]), node.args[1])
        if node.functor == "add" and len(node.args) == 2:
            return Add(_path_of(node.args[0]), node.args[1])
        if node.functor == "del" and len(node.args) == 1:
            return Delete(_path_of(node.args[0]))
    raise ValueError("not an edit: expected set/2, add/2 or del/1")


def _edits_from_term(node: Node) -> DifferenceList:
    if not isinstance(node, Seq):
        raise ValueError("edits must be a {...} sequence")
    return tuple(_edit_from_term(e) for e in node.items)


def _surface_from_term(node: Node) -> SurfaceEdit:
    arity = {"suffix": 1, "strip": 1, "replace": 2}
    if isinstance(node, Compound) and arity.get(node.functor) == len(node.args) \
            and all(isinstance(a, Atom) for a in node.args):
        return SurfaceEdit(node.functor, tuple(a.text for a in node.args))
    raise ValueError("surface edits are suffix(S), strip(S) or replace(Old, New)")


def read_templates(text: str, source: str = "<templates>") -> List[Template]:
    return [Template(name, g) for name, g in _records(text, source)]


def read_lemmas(text: str, source: str = "<lemmas>") -> List[LemmaSpec]:
    out = []
    for name, term in _records(text, source):
        try:
            if not (isinstance(term, Compound) and term.functor == "lemma" and 1 <= len(term.args) <= 2):
                raise ValueError("expected lemma(Parents, {Edits})")
            parents = term.args[0]
            items = parents.items if isinstance(parents, Seq) else (parents,)
            if not all(isinstance(p, Atom) for p in items):
                raise ValueError("parents must be template names")
            diffs = _edits_from_term(term.args[1]) if len(term.args) == 2 else ()
        except ValueError as e:
            raise CompileError([f"{source}: lemma {name}: {e}"]) from e
        out.append(LemmaSpec(name, tuple(p.text for p in items), diffs))
    return out


def read_rules(text: str, source: str = "<rules>") -> List[InflectionRule]:
    out = []
    for name, term in _records(text, source):
        try:
            if not (isinstance(term, Compound) and term.functor == "rule" and 1 <= len(term.args) <= 3):
                raise ValueError("expected rule(Guard, {Edits}, {Surface})")
            edits = _edits_from_term(term.args[1]) if len(term.args) > 1 else ()
            surface = ()
            if len(term.args) > 2:
                if not isinstance(term.args[2], Seq):
                    raise ValueError("surface edits must be a {...} sequence")
                surface = tuple(_surface_from_term(s) for s in term.args[2].items)
        except ValueError as e:
            raise CompileError([f"{source}: rule {name}: {e}"]) from e
        out.append(InflectionRule(name, term.args[0], edits, surface))
    return out


def _path_atom(path: Path) -> Atom:
    return Atom(".".join(f if o == 0 else f"{f}@{o}" for f, o in path))


def edit_to_term(e: Edit) -> Node:
    if isinstance(e, Override):
        return Compound("set", (_path_atom(e.path), e.node))
    if isinstance(e, Add):
        return Compound("add", (_path_atom(e.path), e.node))
    return Compound("del", (_path_atom(e.path),))


def format_template(t: Template) -> str:
    return f"{t.name} := {to_canonical_text(t.graph)}.\n"


def format_lemma(spec: LemmaSpec) -> str:
    parents = [Atom(p) for p in spec.parents]
    term = Compound("lemma", (parents[0] if len(parents) == 1 else Seq(tuple(parents)),
                              Seq(tuple(edit_to_term(e) for e in spec.diffs))))
    return f"{spec.id} := {to_canonical_text(term)}.\n"


def format_rule(rule: InflectionRule) -> str:
    surface = Seq(tuple(Compound(s.op, tuple(Atom(a) for a in s.args)) for s in rule.surface))
    term = Compound("rule", (rule.guard, Seq(tuple(edit_to_term(e) for e in rule.edits)), surface))
    return f"{rule.name} := {to_canonical_text(term)}.\n"
