"""Near-perfect word hashing with frequency-ranked prefix codes.

Every letter has a Huffman code built from Dutch letter frequencies, so
frequent letters cost few bits and typical words hash to small integers.
A word's hash is the concatenation of its letters' codes, read as a
binary number, truncated to the first 63 bits.  Letters are case-folded;
any other character is written as the escape code followed by the low 16
bits of its code point.  Collisions are possible (case, truncation,
leading zero bits) and are resolved by the index buckets.

The code table is generated once from ``data/dutch_letter_freq.tsv`` and
frozen in ``data/word_codes.json``; rebuild it with::

    python -m objlex.wordhash --rebuild
"""

from __future__ import annotations

import argparse
import heapq
import json
from functools import lru_cache
from importlib import resources
from typing import Dict, List, Tuple

ESCAPE = "<esc>"
ESCAPE_PAYLOAD_BITS = 16
HASH_BITS = 63


def read_frequencies(text: str) -> Dict[str, int]:
    freqs = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        symbol, weight = line.split("\t")
        freqs[symbol] = int(weight)
    return freqs


def code_lengths(freqs: Dict[str, int]) -> Dict[str, int]:
    # ties broken by insertion sequence, so the result is platform independent
    heap: List[Tuple[int, int, List[str]]] = []
    for seq, symbol in enumerate(sorted(freqs)):
        heap.append((freqs[symbol], seq, [symbol]))
    heapq.heapify(heap)
    lengths = dict.fromkeys(freqs, 0)
    seq = len(heap)
    while len(heap) > 1:
        w1, _, s1 = heapq.heappop(heap)
        w2, _, s2 = heapq.heappop(heap)
        for s in s1 + s2:
            lengths[s] += 1
        heapq.heappush(heap, (w1 + w2, seq, s1 + s2))
        seq += 1
    return lengths


def build_code_table(freqs: Dict[str, int]) -> Dict[str, str]:
    """Canonical Huffman codes, bit-complemented.

    Complementing keeps the code prefix-free but gives the most frequent
    letters codes that start with 1, so common words do not lose leading
    zero bits when read as integers.
    """
    lengths = code_lengths(freqs)
    table = {}
    code = 0
    prev_len = 0
    for symbol in sorted(lengths, key=lambda s: (lengths[s], s)):
        n = lengths[symbol]
        code <<= n - prev_len
        prev_len = n
        bits = format(code, f"0{n}b")
        table[symbol] = "".join("1" if b == "0" else "0" for b in bits)
        code += 1
    return table


def _data_text(name: str) -> str:
    return resources.files("objlex").joinpath("data", name).read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def code_table() -> Dict[str, str]:
    return json.loads(_data_text("word_codes.json"))


@lru_cache(maxsize=None)
def _int_codes() -> Dict[str, Tuple[int, int]]:
    return {s: (int(bits, 2), len(bits)) for s, bits in code_table().items()}


def word_hash(word: str) -> int:
    codes = _int_codes()
    esc_value, esc_len = codes[ESCAPE]
    value = 0
    nbits = 0
    for ch in word:
        code = codes.get(ch) or codes.get(ch.lower())
        if code is not None:
            pieces = [code]
        else:
            payload = ord(ch) & ((1 << ESCAPE_PAYLOAD_BITS) - 1)
            pieces = [(esc_value, esc_len), (payload, ESCAPE_PAYLOAD_BITS)]
        for bits, n in pieces:
            room = HASH_BITS - nbits
            if n >= room:
                return (value << room) | (bits >> (n - room))
            value = (value << n) | bits
            nbits += n
    return value


def main(argv=None):
    ap = argparse.ArgumentParser(description="Inspect or rebuild the word hash code table.")
    ap.add_argument("--rebuild", action="store_true",
                    help="regenerate data/word_codes.json from the frequency list")
    args = ap.parse_args(argv)
    table = build_code_table(read_frequencies(_data_text("dutch_letter_freq.tsv")))
    if args.rebuild:
        target = resources.files("objlex").joinpath("data", "word_codes.json")
        with resources.as_file(target) as path:
            path.write_text(json.dumps(table, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    for symbol in sorted(table, key=lambda s: (len(table[s]), s)):
        print(f"{symbol}\t{table[symbol]}")


if __name__ == "__main__":
    main()
