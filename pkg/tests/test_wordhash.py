"""Word hash tests.

The golden file was produced by :func:`oracle_hash` below, which works on
bit strings and shares no code with the package's integer implementation.
Regenerate it with ``python3 tests/test_wordhash.py`` only when the code
table changes on purpose.
"""

import json
import sys
from importlib import resources
from pathlib import Path

from hypothesis import given
from hypothesis import strategies as st

from objlex.wordhash import (
    ESCAPE, build_code_table, code_table, read_frequencies, word_hash,
)

DATA = Path(__file__).parent / "data"
WORDS = DATA / "words_1000.txt"
GOLDEN = DATA / "words_1000.golden"


def _shipped_table():
    text = resources.files("objlex").joinpath("data", "word_codes.json").read_text(encoding="utf-8")
    return json.loads(text)


def oracle_hash(word, table=None):
    table = table or _shipped_table()
    bits = ""
    for ch in word:
        code = table.get(ch) or table.get(ch.lower())
        if code is None:
            code = table[ESCAPE] + format(ord(ch) % 65536, "016b")
        bits += code
    bits = bits[:63]
    return int(bits, 2) if bits else 0


def read_words():
    raw = WORDS.read_text(encoding="utf-8").splitlines()
    return [w.replace("\\t", "\t").replace("\\\\", "\\") for w in raw]


def test_empty_word():
    assert word_hash("") == 0


def test_de_by_concatenation():
    t = _shipped_table()
    assert word_hash("de") == int(t["d"] + t["e"], 2)


def test_range():
    for w in ["", "a", "e" * 100, "中文" * 10]:
        assert 0 <= word_hash(w) <= 2**63 - 1


def test_frequent_letters_get_short_codes():
    t = code_table()
    assert len(t["e"]) < len(t["q"])
    assert len(t["n"]) <= len(t["x"])


def test_code_table_is_prefix_free():
    codes = sorted(code_table().values())
    for a, b in zip(codes, codes[1:]):
        assert not b.startswith(a)


def test_shipped_table_matches_frequency_list():
    text = resources.files("objlex").joinpath("data", "dutch_letter_freq.tsv").read_text(encoding="utf-8")
    assert build_code_table(read_frequencies(text)) == code_table()


def test_golden_file():
    words = read_words()
    assert len(words) == 1000 and len(set(words)) == 1000
    golden = [int(x) for x in GOLDEN.read_text().split()]
    assert [word_hash(w) for w in words] == golden


def test_truncation_collision():
    # the first 63 bits decide the hash, so long words sharing them collide
    t = code_table()
    base = "e" * (63 // len(t["e"]) + 1)
    assert word_hash(base + "a") == word_hash(base + "z")


def test_case_folds():
    assert word_hash("Nederlander") == word_hash("nederlander")


@given(st.text(max_size=40))
def test_matches_oracle(word):
    assert word_hash(word) == oracle_hash(word)


if __name__ == "__main__":
    GOLDEN.write_text("".join(f"{oracle_hash(w)}\n" for w in read_words()))
    sys.exit(0)
