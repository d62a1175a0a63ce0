from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from objlex.compiler import compile_lexicon, read_lemmas, read_rules, read_templates
from objlex.errors import BudgetError, DeadEndError, GenerationError
from objlex.featgraph import Atom, Compound, Seq
from objlex.generator import generate, render, start, step
from objlex.index import build_lexicon, open_lexicon
from objlex.store import StoreHandle

from conftest import desk_file, desk_meta_paths

TEMPLATES = desk_file("templates.lex").read_text()
RULES = desk_file("rules.lex").read_text()
LEMMAS = desk_file("lemmas.lex").read_text()


def lexicon(tmp_path, lemmas: str) -> StoreHandle:
    entries = compile_lexicon(read_templates(TEMPLATES), read_lemmas(lemmas), read_rules(RULES))
    build_lexicon(entries, desk_meta_paths(), tmp_path)
    return open_lexicon(tmp_path)


def drop(*names):
    return "\n".join(l for l in LEMMAS.splitlines() if not l.startswith(names))


def labels(seq: Seq):
    return [x.text for x in seq.items]


class TestStart:
    def test_noun_start(self, desk):
        a = start(desk, "meaning")
        assert [h.category for h in a.heads] == ["n"] and a.args == []
        assert labels(a.log[-1].get("heads")) == ["n_plur"]

    def test_verb_start_opens_both_args(self, desk):
        a = start(desk, "discover")
        assert [x.arg.result for x in a.args] == ["np", "np"]
        assert render(a.heads[0].phon) == "_ ontdekt _"

    def test_unknown_concept(self, desk):
        with pytest.raises(GenerationError, match="unknown-concept"):
            start(desk, "nonexistent")

    def test_random_concept(self, desk):
        a = start(desk, None, seed=3)
        assert a.log[0].get("concept").text in {"meaning", "dutchman", "that", "deep", "discover", "sleep"}

    def test_empty_lexicon(self, tmp_path):
        build_lexicon([], [], tmp_path)
        with open_lexicon(tmp_path) as h:
            with pytest.raises(GenerationError, match="empty-lexicon"):
                start(h, "x")


class TestDesk:
    def test_table_sentence(self, desk):
        s = generate(desk, "meaning", seed=0)
        assert s.surface == "die Nederlander ontdekt diepe betekenissen"
        actions = [(r.n, r.action) for r in s.derivation]
        assert actions == [(i + 1, a) for i, a in enumerate(["search", "insert"] + ["search", "reduce"] * 4)]

    def test_object_before_subject(self, desk):
        words = [r.get("word").text for r in generate(desk, "meaning").derivation if r.get("word")]
        assert words == ["betekenissen", "diepe", "ontdekt", "die", "Nederlander"]

    def test_object_number_bound_at_step_six(self, desk):
        rec = generate(desk, "meaning").derivation[5]
        assert rec.n == 6
        assert rec.get("bound") == Seq((Compound("bind", (Atom("arg@1.synsem@0.num@0"), Atom("plur"))),))

    def test_intransitive(self, desk):
        assert generate(desk, "sleep").surface == "die Nederlander slaapt"

    def test_log_is_text(self, desk):
        first = generate(desk, "meaning").derivation[0].to_text()
        assert first.startswith("step(1, search, [concept:meaning")

    def test_result_graph_is_sentential(self, desk):
        s = generate(desk, "discover")
        assert s.graph.get("synsem").get("cat") == Atom("s")


class TestFailures:
    def test_agreement_clash_is_dead_end(self, tmp_path):
        # the only singular determiner is gone, so no subject agrees with ontdekt
        with lexicon(tmp_path, drop("die ")) as h:
            with pytest.raises(DeadEndError) as info:
                generate(h, "meaning")
            assert info.value.derivation and info.value.derivation[-1].action == "search"
            assert info.value.derivation[-1].get("candidates") == Seq(())

    def test_minimal_intransitive(self, tmp_path):
        text = (
            "jan := lemma(det, {set('head.concept', john), set(phon, 'Jan'), set('synsem.num', sing),"
            " del(arg), set(type, np)}).\n"
            "slaap := lemma(intransitive, {set('head.concept', sleep), set(phon, slaap)}).\n"
        )
        with lexicon(tmp_path, text) as h:
            s = generate(h, "sleep")
            assert s.surface == "Jan slaapt"
            assert len(s.surface.split()) == 2

    def test_budget(self, desk):
        with pytest.raises(BudgetError) as info:
            generate(desk, "meaning", budget=1)
        assert len(info.value.derivation) > 0

    def test_budget_must_be_positive(self, desk):
        with pytest.raises(ValueError):
            generate(desk, "meaning", budget=0)

    def test_step_on_terminal(self, desk):
        a = start(desk, "discover")
        while not a.terminal:
            step(desk, a)
        with pytest.raises(GenerationError):
            step(desk, a)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["meaning", "dutchman", "that", "deep", "discover", "sleep"]), st.integers(0, 10**6))
def test_replay_and_word_multiset(desk_dir, concept, seed):
    with open_lexicon(desk_dir) as h:
        try:
            first = generate(h, concept, seed)
        except DeadEndError as e:
            with pytest.raises(DeadEndError) as again:
                generate(h, concept, seed)
            assert [r.to_text() for r in again.value.derivation] == [r.to_text() for r in e.derivation]
            return
        second = generate(h, concept, seed)
    assert first.surface == second.surface
    assert [r.to_text() for r in first.derivation] == [r.to_text() for r in second.derivation]
    chosen = [r.get("word").text for r in first.derivation if r.get("word") is not None]
    assert Counter(first.surface.split()) == Counter(chosen)
    assert "_" not in first.surface.split()
