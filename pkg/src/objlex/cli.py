"""Command-line interface.

Exit codes: 0 success, 1 input or validation error, 2 generation dead end
(or exhausted budget), 3 store corruption.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from .codec import from_canonical_text, to_canonical_text
from .compiler import compile_lexicon, read_lemmas, read_rules, read_templates
from .errors import (
    BudgetError, CompileError, DeadEndError, GenerationError, QueryError, StoreError,
)
from .featgraph import format_path, parse_path
from .generator import generate
from .index import INDEX_FILES, build_lexicon, lookup, lookup_meta, open_lexicon
from .query import execute, parse_expression

EXIT_OK, EXIT_INPUT, EXIT_DEAD_END, EXIT_CORRUPT = 0, 1, 2, 3


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def cmd_build(args) -> int:
    try:
        templates = read_templates(_read(args.templates), args.templates)
        lemmas = read_lemmas(_read(args.lemmas), args.lemmas)
        rules = read_rules(_read(args.rules), args.rules)
        paths = [parse_path(p) for p in args.meta_path]
        entries = compile_lexicon(templates, lemmas, rules)
    except CompileError as e:
        for line in e.problems:
            _err(line)
        return EXIT_INPUT
    except (OSError, ValueError) as e:
        _err(str(e))
        return EXIT_INPUT
    if not entries:
        print("warning: no entries compiled", file=sys.stderr)
    try:
        sizes = build_lexicon(entries, paths, args.out)
    except ValueError as e:
        _err(str(e))
        return EXIT_INPUT
    print(f"entries\t{len(entries)}")
    for name, size in sizes.items():
        print(f"size\t{name}\t{size}")
    index_bytes = sum(sizes[n] for n in INDEX_FILES)
    obj = sizes["lexicon.obj"]
    ratio = index_bytes / obj if obj else 0.0
    print(f"index_object_ratio\t{ratio:.4f}")
    return EXIT_OK


def cmd_get(args) -> int:
    with open_lexicon(args.dir) as h:
        try:
            entry = h.get_object(args.id, fresh=False)
        except IndexError as e:
            _err(str(e))
            return EXIT_INPUT
        print(to_canonical_text(entry.graph) + ".")
    return EXIT_OK


def cmd_query(args) -> int:
    with open_lexicon(args.dir) as h:
        q = parse_expression(args.expr, h.indexes.meta.paths)
        ids = execute(h, q)
        for oid in ids:
            if args.entries:
                print(f"{oid}\t{to_canonical_text(h.get_object(oid, fresh=False).graph)}")
            else:
                print(oid)
    return EXIT_OK


def cmd_generate(args) -> int:
    with open_lexicon(args.dir) as h:
        try:
            sentence = generate(h, args.concept, args.seed, args.budget)
        except (DeadEndError, BudgetError) as e:
            if args.trace:
                for rec in e.derivation:
                    print(rec.to_text())
            _err(str(e))
            return EXIT_DEAD_END
        if args.trace:
            for rec in sentence.derivation:
                print(rec.to_text())
        print(sentence.surface)
    return EXIT_OK


def cmd_stats(args) -> int:
    with open_lexicon(args.dir) as h:
        ix = h.indexes
        print(f"entries\t{h.n}")
        print(f"keys\ttype\t{len(ix.types)}")
        print(f"keys\tconcept\t{len(ix.concepts)}\t{ix.concepts.texts()}")
        print(f"keys\tphon\t{len(ix.phons)}\t{ix.phons.texts()}")
        print(f"keys\tmeta\t{len(ix.meta.records)}\t{len(ix.meta.paths)}")
        lists = list(ix.types.values())
        single = sum(1 for p in lists if len(p) == 1)
        print(f"type_single_item_fraction\t{single / len(lists) if lists else 1.0:.4f}")
        spans = [s for p in lists for s in p]
        ranged = sum(1 for s in spans if s.hi > s.lo)
        print(f"type_range_fraction\t{ranged / len(spans) if spans else 0.0:.4f}")
        # sample workload: a few object fetches, one type lookup, one meta lookup
        for oid in sorted({0, h.n // 2, h.n - 1}) if h.n else ():
            h.get_object(oid)
        if lists:
            key = min(ix.types)
            lookup(ix.types, key)
        if ix.meta.records:
            path, value = min(ix.meta.records, key=lambda pv: (format_path(pv[0]), pv[1]))
            lookup_meta(ix.meta, path, from_canonical_text(value, fresh=False))
        for name, value in h.stats().items():
            print(f"counter\t{name}\t{value}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="objlex", description="Read-only indexed lexicon engine.")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="compile sources and write store plus indexes")
    b.add_argument("--templates", required=True)
    b.add_argument("--lemmas", required=True)
    b.add_argument("--rules", required=True)
    b.add_argument("--meta-path", nargs="+", action="extend", default=[],
                   help="feature path to meta-index, e.g. synsem.num")
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build)

    g = sub.add_parser("get", help="print one entry")
    g.add_argument("dir")
    g.add_argument("id", type=int)
    g.set_defaults(func=cmd_get)

    q = sub.add_parser("query", help="run a constraint query")
    q.add_argument("dir")
    q.add_argument("expr", nargs="+", help="field=value or ~field=value")
    q.add_argument("--entries", action="store_true", help="print entries, not just IDs")
    q.set_defaults(func=cmd_query)

    gen = sub.add_parser("generate", help="generate a sentence")
    gen.add_argument("dir")
    gen.add_argument("--concept", default=None)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--budget", type=int, default=32)
    gen.add_argument("--trace", action="store_true")
    gen.set_defaults(func=cmd_generate)

    s = sub.add_parser("stats", help="index sizes and access counters")
    s.add_argument("dir")
    s.set_defaults(func=cmd_stats)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StoreError as e:
        _err(str(e))
        return EXIT_CORRUPT
    except (QueryError, GenerationError, ValueError) as e:
        _err(str(e))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
