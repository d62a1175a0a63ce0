"""Seeded synthetic lexicons at realistic entry size.

Every lemma class has exactly :data:`FORMS_PER_LEMMA` inflection rules, so
a lexicon of ``n`` entries comes from ``n / FORMS_PER_LEMMA`` lemmas.
Entries carry the full feature inventory of a realistic verb entry
(opaque semantics, phonology data, agreement features, one ARG block per
argument), around 0.5 to 1.2 KB each in canonical text.

    python -m objlex.synthetic --entries 10000 --out /tmp/syn-src
"""

from __future__ import annotations

import argparse
import random
import re
from dataclasses import dataclass
from pathlib import Path as FsPath
from typing import Dict, List, Sequence, Tuple

from .category import Arg, Category, category_to_term
from .compiler import (
    InflectionRule, LemmaSpec, Override, SurfaceEdit, Template, compile_lexicon,
    format_lemma, format_rule, format_template,
)
from .featgraph import Atom, Avm, Compound, Disj, Node, Number, Path, Seq, Var, parse_path
from .store import LexicalEntry

FORMS_PER_LEMMA = 10

META_PATHS = [
    "synsem.cat", "synsem.num", "synsem.pers", "synsem.case", "synsem.tense",
    "synsem.gender", "arg@0.synsem.cat", "arg@0.synsem.num", "arg@0.synsem.case",
    "arg@1.synsem.cat", "arg@1.synsem.num", "arg@2.synsem.cat",
]


def meta_paths() -> List[Path]:
    return [parse_path(p) for p in META_PATHS]


def _c(text: str) -> Category:
    """Tiny reader for flat category strings like ``s\\np^wh/np``."""
    parts = re.findall(r"([\\/])?([a-z]+)(?:\^([a-z0-9]+))?", text)
    result = parts[0][1]
    left, right = [], []
    for slash, cat, mode in parts[1:]:
        (left if slash == "\\" else right).append(Arg(cat, mode or "0"))
    return Category(result, tuple(left), tuple(right))


_VP = Category("s", (Arg("np"),))
CLASSES: Dict[str, Tuple[float, List[Category]]] = {
    "noun": (0.38, [_c("n"), _c("n/pp"), _c("n/s^dat"), _c("n/pp^van")]),
    "verb": (0.30, [_c("s\\np"), _c("s\\np/np"), _c("s\\np/np/np"), _c("s\\np/pp"),
                    _c("s\\np/s"), _c("s\\np^wh/np"), _c("q\\np/np"), _c("s\\np/np^1"),
                    _c("s\\np^wh"), _c("q\\np"), _c("s\\np/pp^aan/np")]),
    "adj": (0.14, [_c("n/n"), _c("ap"), _c("ap/pp"), _c("n/n^2"), _c("ap\\np")]),
    "det": (0.03, [_c("np/n"), _c("np/n^wh"), _c("np/n^q")]),
    "prep": (0.06, [_c("pp/np"), _c("pp/np^acc"), _c("pp\\np/np")]),
    "adv": (0.09, [_c("s/s"), _c("s\\s"), Category("s", (Arg(_VP),)),
                   Category("s", (), (Arg(_VP, "wh"),)), _c("q/q")]),
}

_ONSETS = ["b", "d", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w", "z",
           "br", "dr", "gr", "kl", "kr", "sp", "st", "tr", "sch", "ver", "ont", "be"]
_NUCLEI = ["a", "e", "i", "o", "u", "aa", "ee", "oo", "ij", "ui", "ei", "ou", "ie", "oe"]
_CODAS = ["", "", "k", "l", "m", "n", "r", "s", "t", "nd", "rk", "lt", "ng", "cht"]


def _stem(rng: random.Random) -> str:
    return "".join(rng.choice(_ONSETS) + rng.choice(_NUCLEI) + rng.choice(_CODAS)
                   for _ in range(rng.randint(1, 3)))


# -- templates -----------------------------------------------------------------

def _template_graph(cls: str, cat: Category) -> Node:
    links = [f"L{i}" for i in range(len(cat.args))]
    linked = Category(
        cat.result,
        tuple(Arg(a.cat, a.mode, links[i]) for i, (_, a) in enumerate(cat.args[: len(cat.left)])),
        tuple(Arg(a.cat, a.mode, links[len(cat.left) + i]) for i, (_, a) in enumerate(cat.args[len(cat.left):])),
    )
    sem_args = tuple(Var(f"X{i}") for i in range(len(cat.args)))
    synsem = Avm((
        ("cat", Atom(cat.result)), ("pos", Atom(cls)), ("num", Var("Num")), ("pers", Var("Pers")),
        ("case", Var("Case")), ("gender", Var("Gender")), ("tense", Var("Tense")),
        ("flex", Var("Flex")), ("def", Var("Def")),
    ))
    pairs = [
        ("id", Var("I")),
        ("head", Avm((("concept", Var("C")), ("tenseop", Var("Tense")),
                      ("subqmode", Atom("none")), ("lex", Atom(cls))))),
        ("phon", Var("P")),
        ("phondata", Avm((("form", Var("P")), ("lijnop", Compound("lijn", (Var("P"), Seq(tuple(Var(l) for l in links))))),
                          ("stress", Number(1))))),
        ("slf", Compound("lam", (Seq(sem_args), Compound("pred", (Var("C"), Seq(sem_args), Var("E")))))),
        ("sem", Avm((
            ("qualia", Avm((("formal", Compound("isa", (Var("C"), Atom(cls)))),
                            ("telic", Compound("purpose", (Var("C"), Var("E")))),
                            ("agentive", Compound("origin", (Var("C"), Var("E"))))))),
            ("aspect", Var("Tense")), ("polarity", Atom("pos")), ("modality", Atom("realis")),
            ("index", Compound("ix", (Var("E"), Var("Num"), Var("Pers")))),
        ))),
        ("morph", Avm((("stem", Var("P")), ("paradigm", Atom(f"{cls}_regular")), ("umlaut", Atom("no")),
                       ("separable", Atom("no")), ("aux", Atom("hebben" if cls == "verb" else "none"))))),
        ("synsem", synsem),
        ("type", category_to_term(linked)),
    ]
    roles = ["agent", "patient", "theme", "goal"]
    for i, (direction, a) in enumerate(cat.args):
        agree = i == 0 and direction == "left"
        arg_syn = Avm((
            ("cat", Atom(a.result)),
            ("num", Var("Num") if agree else Var(f"_N{i}")),
            ("pers", Var("Pers") if agree else Var(f"_P{i}")),
            ("case", Atom("nom") if agree else Var(f"_C{i}")),
            ("mode", Atom(a.mode)),
        ))
        pairs.append(("arg", Avm((("id", Var(links[i])), ("synsem", arg_syn), ("slf", Var(f"X{i}")),
                                  ("sel", Avm((("animacy", Var(f"_A{i}")), ("sort", Atom("entity")),
                                               ("restr", Compound("restr", (Var(f"X{i}"), Var("E"))))))),
                                  ("role", Atom(roles[i % len(roles)])), ("dir", Atom(direction))))))
    return Avm(tuple(pairs))


def templates() -> List[Template]:
    out = []
    for cls, (_, cats) in CLASSES.items():
        for i, cat in enumerate(cats):
            out.append(Template(f"{cls}_{i}", _template_graph(cls, cat)))
    return out


# -- rules -------------------------------------------------------------------------

def _rule(cls: str, name: str, suffix: str, **values) -> InflectionRule:
    edits = []
    for feature, value in values.items():
        if isinstance(value, tuple):
            node = Disj(tuple(Number(v) if isinstance(v, int) else Atom(v) for v in value))
        elif isinstance(value, int):
            node = Number(value)
        else:
            node = Atom(value)
        edits.append(Override(parse_path(f"synsem.{feature}"), node))
    surface = (SurfaceEdit("suffix", (suffix,)),) if suffix else ()
    guard = Avm((("synsem", Avm((("pos", Atom(cls)),))),))
    return InflectionRule(f"{cls}_{name}", guard, tuple(edits), surface)


def rules() -> List[InflectionRule]:
    r = []
    noun = [("sg", "", dict(num="sing", pers=3, case="nom")), ("pl", "en", dict(num="plur", pers=3)),
            ("pls", "s", dict(num="plur", pers=3, case="acc")), ("dim", "je", dict(num="sing", gender="neut")),
            ("dimpl", "jes", dict(num="plur", gender="neut")), ("gen", "s", dict(num="sing", case="gen")),
            ("dat", "e", dict(num="sing", case="dat")), ("voc", "", dict(case="voc")),
            ("coll", "heid", dict(num="sing", gender="fem", pers=3)), ("agent", "er", dict(gender="masc"))]
    verb = [("p1sg", "", dict(num="sing", pers=1, tense="pres", flex="fin")),
            ("p23sg", "t", dict(num="sing", pers=(2, 3), tense="pres", flex="fin")),
            ("ppl", "en", dict(num="plur", tense="pres", flex="fin")),
            ("psg", "te", dict(num="sing", tense="past", flex="fin")),
            ("ppl2", "ten", dict(num="plur", tense="past", flex="fin")),
            ("inf", "en", dict(flex="inf")), ("part", "d", dict(flex="part", tense="past")),
            ("gerund", "end", dict(flex="ger", tense="pres")),
            ("imp", "", dict(flex="imp", pers=2)), ("subj", "e", dict(flex="subj", num="sing", pers=3))]
    adj = [("base", "", dict(flex="base")), ("infl", "e", dict(flex="infl")),
           ("comp", "er", dict(flex="comp")), ("compi", "ere", dict(flex="comp", num="plur")),
           ("sup", "st", dict(flex="sup")), ("supi", "ste", {"flex": "sup", "def": "def"}),
           ("part", "s", dict(case="gen")), ("neut", "", dict(gender="neut", num="sing")),
           ("pl", "e", dict(num="plur")), ("adv", "lijk", dict(flex="adv"))]
    det = [(f"d{i}", s, dict(num=n, gender=g)) for i, (s, n, g) in enumerate(
        [("", "sing", "masc"), ("e", "sing", "fem"), ("n", "plur", "masc"), ("t", "sing", "neut"),
         ("s", "plur", "fem"), ("r", "sing", "masc"), ("m", "plur", "neut"), ("ne", "sing", "neut"),
         ("re", "plur", "masc"), ("st", "sing", "fem")])]
    prep = [(f"c{i}", s, dict(case=c)) for i, (s, c) in enumerate(
        [("", "acc"), ("e", "dat"), ("s", "gen"), ("en", "acc"), ("t", "dat"), ("er", "gen"),
         ("n", "obl"), ("de", "obl"), ("te", "acc"), ("st", "dat")])]
    adv = [(f"a{i}", s, dict(tense=t)) for i, (s, t) in enumerate(
        [("", "pres"), ("s", "past"), ("e", "fut"), ("er", "pres"), ("st", "past"), ("en", "fut"),
         ("t", "perf"), ("lijk", "pres"), ("jes", "past"), ("waarts", "fut")])]
    for cls, table in (("noun", noun), ("verb", verb), ("adj", adj), ("det", det),
                       ("prep", prep), ("adv", adv)):
        assert len(table) == FORMS_PER_LEMMA
        for name, suffix, values in table:
            r.append(_rule(cls, name, suffix, **values))
    return r


# -- lemmas ------------------------------------------------------------------------

def lemmas(n_lemmas: int, seed: int = 0) -> List[LemmaSpec]:
    rng = random.Random(seed)
    classes = list(CLASSES)
    weights = [CLASSES[c][0] for c in classes]
    out = []
    seen = set()
    for k in range(n_lemmas):
        cls = rng.choices(classes, weights)[0]
        cat_index = rng.randrange(len(CLASSES[cls][1]))
        stem = _stem(rng)
        while stem in seen:
            stem += rng.choice("aeiou")
        seen.add(stem)
        diffs = [Override(parse_path("head.concept"), Atom(f"{stem}_{k}")),
                 Override(parse_path("phon"), Atom(stem))]
        if cls in ("noun", "adj") and rng.random() < 0.5:
            diffs.append(Override(parse_path("synsem.gender"), Atom(rng.choice(["masc", "fem", "neut"]))))
        if cls == "verb" and rng.random() < 0.3:
            diffs.append(Override(parse_path("synsem.case"), Atom("nom")))
        out.append(LemmaSpec(f"l{k}", (f"{cls}_{cat_index}",), tuple(diffs)))
    return out


@dataclass
class SyntheticSources:
    templates: List[Template]
    lemmas: List[LemmaSpec]
    rules: List[InflectionRule]

    def compile(self) -> List[LexicalEntry]:
        return compile_lexicon(self.templates, self.lemmas, self.rules)

    def write(self, directory) -> Dict[str, FsPath]:
        d = FsPath(directory)
        d.mkdir(parents=True, exist_ok=True)
        paths = {name: d / f"{name}.lex" for name in ("templates", "lemmas", "rules")}
        paths["templates"].write_text("".join(map(format_template, self.templates)), encoding="utf-8")
        paths["lemmas"].write_text("".join(map(format_lemma, self.lemmas)), encoding="utf-8")
        paths["rules"].write_text("".join(map(format_rule, self.rules)), encoding="utf-8")
        return paths


def sources(n_entries: int, seed: int = 0) -> SyntheticSources:
    if n_entries % FORMS_PER_LEMMA:
        raise ValueError(f"entry count must be a multiple of {FORMS_PER_LEMMA}")
    return SyntheticSources(templates(), lemmas(n_entries // FORMS_PER_LEMMA, seed), rules())


def synthetic_lexicon(n_entries: int, seed: int = 0) -> List[LexicalEntry]:
    return sources(n_entries, seed).compile()


def main(argv: Sequence[str] = None):
    ap = argparse.ArgumentParser(description="Write synthetic lexicon sources.")
    ap.add_argument("--entries", type=int, default=10000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", required=True)
    args = ap.parse_args(argv)
    paths = sources(args.entries, args.seed).write(args.out)
    for name, p in paths.items():
        print(f"{name}\t{p}")
    print("meta-paths\t" + " ".join(META_PATHS))


if __name__ == "__main__":
    main()
