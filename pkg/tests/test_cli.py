import pytest

from objlex.cli import main
from objlex.featgraph import parse_path
from objlex.index import META_INDEX_FILE, open_lexicon
from objlex.query import parse_expression
from objlex.store import TAB_FILE

from conftest import desk_file, desk_meta_paths
from oracle import oracle_ids


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def build_args(out, lemmas=None, rules=None):
    paths = desk_file("meta_paths.txt").read_text().split()
    return ["build", "--templates", desk_file("templates.lex"), "--lemmas", lemmas or desk_file("lemmas.lex"),
            "--rules", rules or desk_file("rules.lex"), "--meta-path", *paths, "--out", out]


class TestBuild:
    def test_desk(self, capsys, tmp_path):
        code, out, _ = run(capsys, *build_args(tmp_path))
        lines = out.splitlines()
        assert code == 0 and lines[0] == "entries\t6"
        ratio = float(lines[-1].split("\t")[1])
        assert lines[-1].startswith("index_object_ratio\t") and ratio > 0

    def test_empty_lemmas(self, capsys, tmp_path):
        empty = tmp_path / "empty.lex"
        empty.write_text("% nothing here\n")
        code, out, err = run(capsys, *build_args(tmp_path / "out", lemmas=empty))
        assert code == 0 and out.startswith("entries\t0") and "warning" in err

    def test_bad_rule_syntax(self, capsys, tmp_path):
        bad = tmp_path / "rules.lex"
        bad.write_text("r := rule([cat v], {}).\n")
        code, _, err = run(capsys, *build_args(tmp_path / "out", rules=bad))
        assert code == 1 and f"{bad}:1:" in err

    def test_missing_source(self, capsys, tmp_path):
        code, _, err = run(capsys, *build_args(tmp_path / "out", rules=tmp_path / "nope.lex"))
        assert code == 1 and err.startswith("error:")


class TestGet:
    def test_matches_object_record(self, capsys, desk_dir):
        code, out, _ = run(capsys, "get", desk_dir, 0)
        with open_lexicon(desk_dir) as h:
            assert out.encode() == h.raw_record(0)
        assert code == 0 and "'Nederlander'" in out

    def test_out_of_range(self, capsys, desk_dir):
        code, _, err = run(capsys, "get", desk_dir, 6)
        assert code == 1 and "error" in err


class TestQuery:
    def test_no_match(self, capsys, desk_dir):
        assert run(capsys, "query", desk_dir, "phon=zzz") == (0, "", "")

    def test_against_oracle(self, capsys, desk_dir):
        expr = ["~num=plur", "concept=meaning"]
        code, out, _ = run(capsys, "query", desk_dir, *expr)
        with open_lexicon(desk_dir) as h:
            graphs = [h.get_object(i).graph for i in range(h.n)]
        q = parse_expression(expr, desk_meta_paths())
        assert code == 0 and [int(x) for x in out.split()] == oracle_ids(graphs, q.constraints) == [1]

    def test_entries_flag(self, capsys, desk_dir):
        _, out, _ = run(capsys, "query", desk_dir, "type=s\\np/np", "--entries")
        assert out.startswith("5\t[") and "ontdekt" in out

    def test_bad_expression(self, capsys, desk_dir):
        code, _, err = run(capsys, "query", desk_dir, "nonsense")
        assert code == 1 and "bad constraint" in err


class TestGenerate:
    def test_trace(self, capsys, desk_dir):
        code, out, _ = run(capsys, "generate", desk_dir, "--concept", "meaning", "--seed", 0, "--trace")
        lines = out.splitlines()
        assert code == 0 and lines[-1] == "die Nederlander ontdekt diepe betekenissen"
        assert len(lines) == 11 and all(l.startswith(f"step({i + 1}, ") for i, l in enumerate(lines[:-1]))

    def test_deterministic(self, capsys, desk_dir):
        first = run(capsys, "generate", desk_dir, "--seed", 17, "--trace")
        assert run(capsys, "generate", desk_dir, "--seed", 17, "--trace") == first

    def test_starved_lexicon(self, capsys, tmp_path):
        lemmas = tmp_path / "lemmas.lex"
        lemmas.write_text("\n".join(l for l in desk_file("lemmas.lex").read_text().splitlines()
                                    if not l.startswith("die ")))
        assert run(capsys, *build_args(tmp_path / "out", lemmas=lemmas))[0] == 0
        code, out, err = run(capsys, "generate", tmp_path / "out", "--concept", "meaning", "--trace")
        assert code == 2 and "dead-end" in err
        assert out.startswith("step(1, ") and "candidates:{}" in out.splitlines()[-1]

    def test_budget(self, capsys, desk_dir):
        code, out, err = run(capsys, "generate", desk_dir, "--concept", "meaning", "--budget", 1, "--trace")
        assert code == 2 and "budget" in err and out

    def test_unknown_concept(self, capsys, desk_dir):
        code, _, err = run(capsys, "generate", desk_dir, "--concept", "nothing")
        assert code == 1 and "unknown-concept" in err


class TestStats:
    def fields(self, out):
        return {tuple(l.split("\t")[:-1]): l.split("\t")[-1] for l in out.splitlines()}

    def test_desk(self, capsys, desk_dir):
        code, out, _ = run(capsys, "stats", desk_dir)
        f = self.fields(out)
        assert code == 0 and f[("entries",)] == "6"
        assert f[("type_single_item_fraction",)] == "1.0000"
        assert f[("type_range_fraction",)] == "0.5000"
        assert f[("counter", "seeks")] == "7"

    def test_empty_store(self, capsys, tmp_path):
        empty = tmp_path / "e.lex"
        empty.write_text("")
        run(capsys, *build_args(tmp_path / "out", lemmas=empty))
        code, out, _ = run(capsys, "stats", tmp_path / "out")
        f = self.fields(out)
        assert code == 0 and f[("entries",)] == "0" and f[("counter", "seeks")] == "0"


@pytest.mark.parametrize("damage", ["tab", "meta"])
def test_corruption_exits_3(capsys, tmp_path, damage):
    run(capsys, *build_args(tmp_path))
    if damage == "tab":
        tab = tmp_path / TAB_FILE
        tab.write_bytes(tab.read_bytes()[:-3])
    else:
        (tmp_path / META_INDEX_FILE).write_text("garbage without tabs.\n")
    code, _, err = run(capsys, "get", tmp_path, 0)
    assert code == 3 and err.startswith("error:")


def test_meta_path_is_parsed():
    assert parse_path("arg@1.synsem.num") in desk_meta_paths()
