"""Feature graphs: node types, unification, resolution and flattening.

A feature graph is an immutable tree of nodes.  Re-entrancy is expressed
only through shared variable names, so a graph is acyclic by construction
and every structure-sharing relation lives in a bindings dict.

Unification works on a private copy of the bindings and returns the
extended copy, or ``None`` on failure.  The caller's dict is never
mutated.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple, Union

__all__ = [
    "Atom", "Number", "Var", "Seq", "Disj", "Avm", "Compound", "Node",
    "Path", "Bindings", "parse_path", "format_path", "path_get",
    "unify", "unify_graphs", "resolve", "flatten", "variables",
    "rename_vars", "canonical", "equivalent", "is_atomic",
]


@dataclass(frozen=True, slots=True)
class Atom:
    text: str


@dataclass(frozen=True, slots=True)
class Number:
    value: int


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Seq:
    items: tuple


def _member_key(node):
    return (0, node.value, "") if isinstance(node, Number) else (1, 0, node.text)


@dataclass(frozen=True, slots=True)
class Disj:
    """A set of atomic alternatives, kept sorted and duplicate-free."""

    members: tuple

    def __post_init__(self):
        if not self.members:
            raise ValueError("empty disjunction")
        for m in self.members:
            if not isinstance(m, (Atom, Number)):
                raise TypeError(f"disjunction member must be atomic, got {m!r}")
        object.__setattr__(self, "members", tuple(sorted(set(self.members), key=_member_key)))


@dataclass(frozen=True, slots=True)
class Avm:
    """Ordered feature/value pairs.  A feature may occur more than once."""

    pairs: tuple = ()

    def indexed(self) -> Iterator[Tuple[str, int, "Node"]]:
        seen: Dict[str, int] = {}
        for feature, value in self.pairs:
            occ = seen.get(feature, 0)
            seen[feature] = occ + 1
            yield feature, occ, value

    def get(self, feature: str, occ: int = 0) -> Optional["Node"]:
        for f, v in self.pairs:
            if f == feature:
                if not occ:
                    return v
                occ -= 1
        return None

    def count(self, feature: str) -> int:
        return sum(1 for f, _ in self.pairs if f == feature)


@dataclass(frozen=True, slots=True)
class Compound:
    functor: str
    args: tuple


Node = Union[Atom, Number, Var, Seq, Disj, Avm, Compound]
Path = Tuple[Tuple[str, int], ...]
Bindings = Dict[str, Node]

_STEP = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)(?:@(\d+))?\Z")


def parse_path(text: str) -> Path:
    """Parse ``synsem@0.num`` style paths; a missing occurrence means 0."""
    steps = []
    for part in text.split("."):
        m = _STEP.match(part)
        if not m:
            raise ValueError(f"bad path step {part!r} in {text!r}")
        steps.append((m.group(1), int(m.group(2) or 0)))
    return tuple(steps)


def format_path(path: Path) -> str:
    return ".".join(f"{f}@{o}" for f, o in path)


def path_get(g: Node, path: Path) -> Optional[Node]:
    node = g
    for feature, occ in path:
        if not isinstance(node, Avm):
            return None
        node = node.get(feature, occ)
        if node is None:
            return None
    return node


def is_atomic(node: Node) -> bool:
    return isinstance(node, (Atom, Number, Disj))


# -- unification -----------------------------------------------------------

def _walk(node: Node, env: Bindings) -> Tuple[Node, Optional[Var]]:
    """Dereference a variable chain.

    Returns the final node and the last variable of the chain that is
    bound directly to it (``None`` if ``node`` was not a bound variable).
    """
    holder = None
    while isinstance(node, Var) and node.name in env:
        holder = node
        node = env[node.name]
    return node, holder


def _occurs(name: str, node: Node, env: Bindings) -> bool:
    stack = [node]
    while stack:
        n = stack.pop()
        # check every variable along a binding chain, not just its end
        while isinstance(n, Var):
            if n.name == name:
                return True
            if n.name not in env:
                break
            n = env[n.name]
        if isinstance(n, Avm):
            stack.extend(v for _, v in n.pairs)
        elif isinstance(n, Seq):
            stack.extend(n.items)
        elif isinstance(n, Compound):
            stack.extend(n.args)
    return False


def _meet(a: Node, b: Node) -> Optional[Node]:
    """Unify two atomic nodes where at least one is a disjunction."""
    sa = set(a.members) if isinstance(a, Disj) else {a}
    sb = set(b.members) if isinstance(b, Disj) else {b}
    common = sa & sb
    if not common:
        return None
    # an atom selects itself; two disjunctions meet in a (possibly singleton) disjunction
    if not isinstance(a, Disj):
        return a
    if not isinstance(b, Disj):
        return b
    return Disj(tuple(common))


def _unify(a: Node, b: Node, env: Bindings) -> Optional[Node]:
    a, ha = _walk(a, env)
    b, hb = _walk(b, env)
    if isinstance(a, Var) or isinstance(b, Var):
        if isinstance(a, Var) and isinstance(b, Var):
            if a.name != b.name:
                env[a.name] = b
            return b
        var, other, holder = (a, b, hb) if isinstance(a, Var) else (b, a, ha)
        if _occurs(var.name, other, env):
            return None
        # Bind to the holding variable, not its value, so a later
        # narrowing of a disjunction is seen through both names.
        env[var.name] = holder if holder is not None else other
        return var
    if isinstance(a, Disj) or isinstance(b, Disj):
        if not (is_atomic(a) and is_atomic(b)):
            return None
        met = _meet(a, b)
        if met is None:
            return None
        for h in (ha, hb):
            if h is not None:
                env[h.name] = met
        return met
    if type(a) is not type(b):
        return None
    if isinstance(a, (Atom, Number)):
        return a if a == b else None
    merged = _unify_composite(a, b, env)
    if merged is None or (ha is None and hb is None):
        return merged
    # A variable held one of the inputs: point it at the merged node and
    # return the variable, so every occurrence sees the extension.
    keep = ha or hb
    if _occurs(keep.name, merged, env):
        return None
    env[keep.name] = merged
    if ha is not None and hb is not None and ha.name != hb.name:
        env[hb.name] = keep
    return keep


def _unify_composite(a: Node, b: Node, env: Bindings) -> Optional[Node]:
    if isinstance(a, Avm):
        return _unify_avm(a, b, env)
    if isinstance(a, Seq):
        if len(a.items) != len(b.items):
            return None
        items = []
        for x, y in zip(a.items, b.items):
            m = _unify(x, y, env)
            if m is None:
                return None
            items.append(m)
        return Seq(tuple(items))
    if isinstance(a, Compound):
        if a.functor != b.functor or len(a.args) != len(b.args):
            return None
        args = []
        for x, y in zip(a.args, b.args):
            m = _unify(x, y, env)
            if m is None:
                return None
            args.append(m)
        return Compound(a.functor, tuple(args))
    return None


def _occurrence_keys(pairs) -> List[Tuple[str, int]]:
    seen: Dict[str, int] = {}
    keys = []
    for f, _ in pairs:
        occ = seen.get(f, 0)
        seen[f] = occ + 1
        keys.append((f, occ))
    return keys


def _unify_avm(a: Avm, b: Avm, env: Bindings) -> Optional[Avm]:
    """Feature union; shared (feature, occurrence) values unify in a's order."""
    if not b.pairs:
        return a
    if not a.pairs:
        return b
    apos = {k: i for i, k in enumerate(_occurrence_keys(a.pairs))}
    partner: Dict[int, Node] = {}
    extra = []
    for key, (f, v) in zip(_occurrence_keys(b.pairs), b.pairs):
        i = apos.get(key)
        if i is None:
            extra.append((f, v))
        else:
            partner[i] = v
    out = list(a.pairs)
    for i in sorted(partner):
        f, v = out[i]
        m = _unify(v, partner[i], env)
        if m is None:
            return None
        out[i] = (f, m)
    out.extend(extra)
    return Avm(tuple(out))


def unify(a: Node, b: Node, env: Optional[Bindings] = None) -> Optional[Bindings]:
    """Unify two graphs under ``env``; return the extended bindings or None."""
    work = dict(env) if env else {}
    return work if _unify(a, b, work) is not None else None


def unify_graphs(a: Node, b: Node, env: Optional[Bindings] = None, resolved: bool = True
                 ) -> Optional[Tuple[Node, Bindings]]:
    """Like :func:`unify` but also return the merged graph.

    With ``resolved=False`` the merged graph keeps its variables, which is
    what a caller needs to continue unifying against it under the returned
    bindings.
    """
    work = dict(env) if env else {}
    merged = _unify(a, b, work)
    if merged is None:
        return None
    return (resolve(merged, work) if resolved else merged), work


def resolve(g: Node, env: Bindings) -> Node:
    """Substitute bound variables transitively; unbound ones stay as they are."""
    if not env:
        return g
    return _resolve(g, env)


def _resolve(node: Node, env: Bindings) -> Node:
    t = type(node)
    if t is Var:
        while type(node) is Var and node.name in env:
            node = env[node.name]
        return node if type(node) is Var else _resolve(node, env)
    if t is Avm:
        pairs = [(f, _resolve(v, env)) for f, v in node.pairs]
        if all(new is old for (_, new), (_, old) in zip(pairs, node.pairs)):
            return node
        return Avm(tuple(pairs))
    if t is Seq:
        items = [_resolve(v, env) for v in node.items]
        return Seq(tuple(items)) if any(a is not b for a, b in zip(items, node.items)) else node
    if t is Compound:
        args = [_resolve(v, env) for v in node.args]
        return Compound(node.functor, tuple(args)) if any(a is not b for a, b in zip(args, node.args)) else node
    return node


def flatten(g: Node) -> List[Tuple[Path, Node]]:
    """Depth-first list of (path, leaf) pairs reachable through Avm features."""
    out: List[Tuple[Path, Node]] = []

    def walk(node, prefix):
        for f, o, v in node.indexed():
            path = prefix + ((f, o),)
            if isinstance(v, Avm):
                walk(v, path)
            else:
                out.append((path, v))

    if isinstance(g, Avm):
        walk(g, ())
    return out


def variables(g: Node) -> List[Var]:
    """Every variable occurrence in document order."""
    out: List[Var] = []

    def walk(n):
        t = type(n)
        if t is Var:
            out.append(n)
        elif t is Avm:
            for _, v in n.pairs:
                walk(v)
        elif t is Seq:
            for v in n.items:
                walk(v)
        elif t is Compound:
            for v in n.args:
                walk(v)

    walk(g)
    return out


def rename_vars(g: Node, mapping) -> Node:
    """Rename variables through ``mapping`` (a dict or a callable)."""
    get = mapping if callable(mapping) else (lambda name: mapping.get(name, name))

    def go(n):
        t = type(n)
        if t is Var:
            return Var(get(n.name))
        if t is Avm:
            return Avm(tuple([(f, go(v)) for f, v in n.pairs]))
        if t is Seq:
            return Seq(tuple([go(v) for v in n.items]))
        if t is Compound:
            return Compound(n.functor, tuple([go(v) for v in n.args]))
        return n

    return go(g)


def _sort_features(n: Node) -> Node:
    if isinstance(n, Avm):
        # sorted() is stable: occurrences of one feature keep their order
        pairs = sorted(((f, _sort_features(v)) for f, v in n.pairs), key=lambda p: p[0])
        return Avm(tuple(pairs))
    if isinstance(n, Seq):
        return Seq(tuple(_sort_features(v) for v in n.items))
    if isinstance(n, Compound):
        return Compound(n.functor, tuple(_sort_features(v) for v in n.args))
    return n


def canonical(g: Node, ignore_order: bool = False) -> Node:
    """Rename variables to ``_0, _1, ...`` by first occurrence."""
    if ignore_order:
        g = _sort_features(g)
    names: Dict[str, str] = {}
    for v in variables(g):
        names.setdefault(v.name, f"_{len(names)}")
    return rename_vars(g, names)


def equivalent(a: Node, b: Node, ignore_order: bool = False) -> bool:
    """Structural equality up to consistent variable renaming."""
    return canonical(a, ignore_order) == canonical(b, ignore_order)
