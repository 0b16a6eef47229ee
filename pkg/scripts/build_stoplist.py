#!/usr/bin/env python3
"""Regenerate the shipped 500-entry frequent-n-gram stoplist.

The runtime never builds this list; it ships as a plain-text fixture.  The
entries approximate the most frequent English corpus n-grams (n = 1..4):
function words and the function-word combinations they form.  To rebuild
from an actual corpus, replace UNIGRAMS/SEED_BIGRAMS with counts from your
dump and rerun.

Usage: python scripts/build_stoplist.py [output-path]
"""

import sys
from pathlib import Path

TARGET_SIZE = 500

UNIGRAMS = [
    "the", "of", "and", "a", "in", "to", "is", "was", "it", "for",
    "as", "on", "with", "by", "at", "from", "that", "this", "which", "or",
    "an", "be", "are", "were", "but", "not", "have", "has", "had", "they",
    "he", "she", "his", "her", "its", "their", "we", "you", "i", "them",
    "who", "what", "when", "where", "also", "been", "will", "would", "can",
    "could", "there", "all", "one", "two", "first", "other", "into", "more",
    "some", "time", "only", "may", "most", "these", "than", "then", "about",
    "out", "up", "so", "no", "if", "do", "does", "did", "such", "any",
    "each", "own", "same", "new", "very", "just", "over", "after", "before",
    "between", "during", "through", "under", "again", "further", "once",
    "here", "why", "how", "both", "few", "many", "much", "made", "make",
    "being", "because", "while", "against", "among", "within", "without",
    "however", "therefore", "thus", "since", "although", "until", "upon",
    "said", "also", "well", "even", "still", "use", "used", "known",
]

PREPOSITIONS = ["of", "in", "to", "on", "for", "with", "at", "by", "from"]
DETERMINERS = ["the", "a", "an", "his", "its", "this"]
VERBS = ["is", "was", "are", "were", "has", "had", "have", "can", "may"]
CONNECTIVES = ["and", "or", "that", "as", "which"]


def build() -> list[str]:
    entries: list[str] = []
    seen: set[str] = set()

    def add(gram: str):
        gram = " ".join(gram.split())
        if gram and gram not in seen and len(entries) < TARGET_SIZE:
            seen.add(gram)
            entries.append(gram)

    for w in UNIGRAMS:
        add(w)
    for p in PREPOSITIONS:
        for d in DETERMINERS:
            add(f"{p} {d}")
    for v in VERBS:
        for d in DETERMINERS:
            add(f"{v} {d}")
    for c in CONNECTIVES:
        for d in DETERMINERS:
            add(f"{c} {d}")
    for v in VERBS:
        for p in PREPOSITIONS:
            add(f"{v} {p}")
    for p in PREPOSITIONS:
        for d in DETERMINERS:
            for c in CONNECTIVES:
                add(f"{c} {p} {d}")
    for v in VERBS:
        for p in PREPOSITIONS:
            for d in DETERMINERS:
                add(f"{v} {p} {d}")
    for c in CONNECTIVES:
        for v in VERBS:
            for p in PREPOSITIONS:
                for d in DETERMINERS:
                    add(f"{c} {v} {p} {d}")
    if len(entries) < TARGET_SIZE:
        raise SystemExit(f"only generated {len(entries)} entries")
    return entries


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parent.parent
        / "src" / "relmap" / "data" / "stoplist.txt")
    entries = build()
    out.write_text("\n".join(entries) + "\n", encoding="utf-8")
    print(f"wrote {len(entries)} n-grams to {out}")


if __name__ == "__main__":
    main()
