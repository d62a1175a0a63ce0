import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from objlex.codec import from_canonical_text
from objlex.errors import StoreError
from objlex.featgraph import Atom, Disj, Number, parse_path
from objlex.index import (
    LIBERAL, META_DATA_FILE, META_INDEX_FILE, PHON_FILE, STRICT, TYPE_FILE,
    build_indexes, build_lexicon, build_meta, load_indexes, lookup, lookup_meta, open_lexicon,
)
from objlex.postings import decompress, parse_postings
from objlex.store import LexicalEntry
from objlex.wordhash import word_hash

from conftest import desk_entries, desk_meta_paths

NUM = parse_path("synsem@0.number@0")


def entry(i, phon, concept="c", type_="n", synsem=""):
    text = f"[head:[concept:{concept}], phon:{phon}, synsem:[{synsem}], type:{type_}]"
    return LexicalEntry(i, from_canonical_text(text))


THREE = [entry(0, "a", synsem="number:sing"), entry(1, "b", synsem="number:plur"), entry(2, "c")]


def meta_handle(tmp_path, entries, paths):
    build_lexicon(entries, paths, tmp_path)
    return open_lexicon(tmp_path)


class TestTables:
    def test_one_type_is_one_range(self):
        ents = [entry(i, f"w{i}") for i in range(5)]
        assert build_indexes(ents).types == {"n": parse_postings("[0+4]")}

    def test_empty(self):
        t = build_indexes([])
        assert t.types == {} and len(t.concepts) == 0 and len(t.phons) == 0

    def test_collision_buckets(self):
        assert word_hash("y") == word_hash("yy") == 0
        t = build_indexes([entry(0, "y"), entry(1, "yy"), entry(2, "y")])
        assert len(t.phons) == 1 and t.phons.texts() == 2
        assert lookup(t.phons, "y") == parse_postings("[0, 2]")
        assert lookup(t.phons, "yy") == parse_postings("[1]")
        assert lookup(t.phons, "yyyy") == ()
        assert lookup(t.phons, "zzz") == ()

    def test_desk_type_lookup(self, desk):
        assert decompress(lookup(desk.indexes.types, "s\\np/np")) == [5]
        assert decompress(lookup(desk.indexes.concepts, "meaning")) == [1]
        assert lookup(desk.indexes.phons, "zzz") == ()
        assert desk.stats()["reads"] == 0


class TestMeta:
    def test_example_lists(self, tmp_path):
        with meta_handle(tmp_path, THREE, [NUM]) as h:
            m = h.indexes.meta
            assert decompress(lookup_meta(m, NUM, Atom("sing"))) == [0]
            assert decompress(lookup_meta(m, NUM, Atom("plur"))) == [1]
            assert decompress(lookup_meta(m, NUM, Atom("plur"), LIBERAL)) == [1, 2]
            assert decompress(lookup_meta(m, NUM, Atom("dual"))) == []
            assert decompress(lookup_meta(m, NUM, Atom("dual"), LIBERAL)) == [2]

    def test_read_counts(self, tmp_path):
        with meta_handle(tmp_path, THREE, [NUM]) as h:
            m = h.indexes.meta
            lookup_meta(m, NUM, Atom("sing"), STRICT)
            assert h.stats()["meta_reads"] == 1
            lookup_meta(m, NUM, Atom("sing"), LIBERAL)
            assert h.stats()["meta_reads"] == 3
            lookup_meta(m, NUM, Atom("dual"), STRICT)
            assert h.stats()["meta_reads"] == 3
            assert h.stats()["obj_reads"] == 0

    def test_var_and_nonatomic_values(self, tmp_path):
        ents = [entry(0, "a", synsem="number:N"), entry(1, "b", synsem="number:[x:1]"),
                entry(2, "c", synsem="number:or(sing, plur)"), entry(3, "d", synsem="number:2")]
        with meta_handle(tmp_path, ents, [NUM]) as h:
            m = h.indexes.meta
            assert decompress(lookup_meta(m, NUM, Atom("sing"), LIBERAL)) == [0, 2]
            assert decompress(lookup_meta(m, NUM, Number(2))) == [3]
            assert decompress(lookup_meta(m, NUM, Atom("2"))) == []
            assert decompress(lookup_meta(m, NUM, Disj((Atom("plur"), Number(2))))) == [2, 3]

    def test_disjunction_is_one_read(self, tmp_path):
        ents = [entry(i, f"w{i}", synsem=f"number:{v}") for i, v in enumerate(["sing", "dual", "plur"])]
        ents.append(entry(3, "w3"))
        with meta_handle(tmp_path, ents, [NUM]) as h:
            m = h.indexes.meta
            either = Disj((Atom("plur"), Atom("sing")))
            assert decompress(lookup_meta(m, NUM, either)) == [0, 2]
            assert h.stats()["meta_reads"] == 1
            assert decompress(lookup_meta(m, NUM, either, LIBERAL)) == [0, 2, 3]
            assert h.stats()["meta_reads"] == 3

    def test_no_entries(self):
        m, data = build_meta([], [])
        assert m.records == {} and data == b""

    def test_reserved_and_unknown_paths(self):
        with pytest.raises(ValueError):
            build_meta(THREE, [parse_path("phon")])
        with pytest.raises(ValueError):
            build_meta(THREE, [NUM, NUM])
        m, _ = build_meta(THREE, [NUM])
        with pytest.raises(KeyError):
            lookup_meta(m, parse_path("synsem.case"), Atom("nom"))

    def test_path_without_values_survives_reload(self, tmp_path):
        case = parse_path("synsem.case")
        with meta_handle(tmp_path, THREE, [NUM, case]) as h:
            assert case in h.indexes.meta
            assert decompress(lookup_meta(h.indexes.meta, case, Atom("nom"), LIBERAL)) == [0, 1, 2]


class TestFiles:
    def test_round_trip(self, desk_dir):
        tables, meta = load_indexes(desk_dir)
        fresh = build_indexes(desk_entries())
        assert tables.types == fresh.types
        assert tables.concepts.buckets == fresh.concepts.buckets
        assert tables.phons.buckets == fresh.phons.buckets
        built, _ = build_meta(desk_entries(), desk_meta_paths())
        assert meta.records == built.records and meta.unspecified == built.unspecified

    def test_type_file_format(self, desk_dir):
        lines = (desk_dir / TYPE_FILE).read_text().splitlines()
        assert "n\t[0+1]." in lines and "s\\np/np\t[5]." in lines

    def test_meta_file_format(self, desk_dir):
        first = (desk_dir / META_INDEX_FILE).read_text().splitlines()[0]
        key, match, unspec = first.rstrip(".").split("\t")
        assert "\x1f" in key and int(match) >= 0 and int(unspec) >= 0

    def _copy(self, src, dst):
        for f in src.iterdir():
            (dst / f.name).write_bytes(f.read_bytes())

    def test_hash_mismatch_detected(self, desk_dir, tmp_path):
        self._copy(desk_dir, tmp_path)
        p = tmp_path / PHON_FILE
        p.write_text(p.read_text().replace("'Nederlander'", "'Nederlandse'"))
        with pytest.raises(StoreError) as info:
            open_lexicon(tmp_path)
        assert info.value.code == "corrupt-index"

    def test_dangling_meta_offset(self, desk_dir, tmp_path):
        self._copy(desk_dir, tmp_path)
        (tmp_path / META_DATA_FILE).write_bytes(b"[0].\n")
        with pytest.raises(StoreError) as info:
            open_lexicon(tmp_path)
        assert info.value.code == "dangling-offset"

    def test_missing_index(self, desk_dir, tmp_path):
        self._copy(desk_dir, tmp_path)
        (tmp_path / TYPE_FILE).unlink()
        with pytest.raises(StoreError):
            open_lexicon(tmp_path)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["n", "v", "a"]), st.sampled_from(["sing", "plur", None])),
                min_size=1, max_size=25))
def test_meta_matches_scan(rows):
    rows.sort(key=lambda r: r[0])
    ents = [entry(i, f"w{i}", type_=t, synsem=f"number:{v}" if v else "") for i, (t, v) in enumerate(rows)]
    m, data = build_meta(ents, [NUM])

    class Fake:
        def read_at(self, off, size):
            return data[off:off + size]

    m.stream = Fake()
    for value in ("sing", "plur"):
        strict = [i for i, (_, v) in enumerate(rows) if v == value]
        liberal = [i for i, (_, v) in enumerate(rows) if v in (value, None)]
        assert decompress(lookup_meta(m, NUM, Atom(value))) == strict
        assert decompress(lookup_meta(m, NUM, Atom(value), LIBERAL)) == liberal
    types = build_indexes(ents).types
    assert all(len(p) == 1 for p in types.values())
