#!/usr/bin/env python3
"""Regenerate the shipped fixture snapshots, triple stores, and problem sets.

Fixtures are hand-built so that the relational evidence uniquely determines
the expected mapping under the deterministic local embedder; rerun after
changing relation content and re-check the tests.
"""

from pathlib import Path

from relmap.sources import Snapshot

DATA = Path(__file__).resolve().parent.parent / "src" / "relmap" / "data"

SOLAR_BASE = ["sun", "earth", "gravity", "solar system", "newton"]
SOLAR_TARGET = ["nucleus", "electrons", "electric force", "atom", "faraday"]

# keys are (source, head, tail); every intra-domain ordered pair not listed
# here still gets an explicit empty entry (negative cache)
SOLAR_RELATIONS = {
    ("fixture-kb", "earth", "sun"): [
        "revolve around", "rotate around", "orbit", "far from",
        "be attracted to"],
    ("fixture-kb", "sun", "earth"): ["attract", "shine on", "pull"],
    ("fixture-kb", "earth", "gravity"): ["generate", "create field of"],
    ("fixture-kb", "gravity", "earth"): ["act on", "hold down"],
    ("fixture-kb", "sun", "solar system"): ["be center of", "dominate"],
    ("fixture-kb", "earth", "solar system"): ["be part of", "belong to"],
    ("fixture-kb", "solar system", "sun"): ["contain", "include"],
    ("fixture-kb", "solar system", "earth"): ["contain", "include"],
    ("fixture-kb", "sun", "gravity"): ["exert", "produce"],
    ("fixture-lm", "newton", "gravity"): ["discovered", "study"],
    ("fixture-lm", "gravity", "newton"): ["be discovered by"],

    ("fixture-kb", "electrons", "nucleus"): [
        "revolve around", "orbit", "spin around", "be attracted to",
        "close to"],
    ("fixture-kb", "nucleus", "electrons"): ["attract", "pull"],
    ("fixture-kb", "electrons", "electric force"): [
        "generate", "create field of"],
    ("fixture-kb", "electric force", "electrons"): ["act on"],
    ("fixture-kb", "nucleus", "atom"): ["be center of", "dominate"],
    ("fixture-kb", "electrons", "atom"): ["be part of", "belong to"],
    ("fixture-kb", "atom", "nucleus"): ["contain", "include"],
    ("fixture-kb", "atom", "electrons"): ["contain", "include"],
    ("fixture-kb", "nucleus", "electric force"): ["exert", "produce"],
    ("fixture-lm", "faraday", "electric force"): ["discovered", "study"],
    ("fixture-lm", "electric force", "faraday"): ["be discovered by"],
}

SOLAR_SOURCES = ["fixture-kb", "fixture-lm", "fixture-unused"]


def fill_snapshot(snapshot: Snapshot, domains: list[list[str]],
                  relations: dict, sources: list[str]) -> None:
    for source, head, tail in relations:
        snapshot.put(source, head, tail, relations[(source, head, tail)])
    for domain in domains:
        for h in domain:
            for t in domain:
                if h == t:
                    continue
                for source in sources:
                    if snapshot.get(source, h, t) is None:
                        snapshot.put(source, h, t, [])


def build_solar() -> Snapshot:
    snap = Snapshot(created_at="2026-01-01T00:00:00+00:00")
    fill_snapshot(snap, [SOLAR_BASE, SOLAR_TARGET], SOLAR_RELATIONS,
                  SOLAR_SOURCES)
    return snap


RIDDLE_ENTITIES = [["answer", "logic", "riddle"], ["key", "mechanism", "lock"]]

RIDDLE_RELATIONS = {
    ("fixture-kb", "answer", "logic"): ["rely on", "depend on"],
    ("fixture-kb", "logic", "answer"): ["drive", "lead to"],
    ("fixture-kb", "riddle", "answer"): ["be opened by", "be solved by"],
    ("fixture-kb", "answer", "riddle"): ["unlock", "open"],
    ("fixture-kb", "key", "mechanism"): ["rely on", "depend on"],
    ("fixture-kb", "mechanism", "key"): ["drive", "lead to"],
    ("fixture-kb", "lock", "key"): ["be opened by", "be solved by"],
    ("fixture-kb", "key", "lock"): ["unlock", "open"],
}

RIDDLE_TRIPLES = [
    ("lock", "be opened by", "key"),
    ("lock", "be solved by", "key"),
    ("door", "be opened by", "key"),
]


def build_riddle() -> Snapshot:
    snap = Snapshot(created_at="2026-01-01T00:00:00+00:00")
    fill_snapshot(snap, RIDDLE_ENTITIES, RIDDLE_RELATIONS, ["fixture-kb"])
    return snap


ATOM_ENTITIES = [["electrons", "electricity", "faraday", "nucleus"],
                 ["earth", "gravity", "newton", "sun", "moon"]]

ATOM_RELATIONS = {
    ("fixture-kb", "electrons", "electricity"): ["generate", "carry"],
    ("fixture-kb", "electricity", "electrons"): ["flow through"],
    ("fixture-kb", "faraday", "electricity"): ["discovered", "study"],
    ("fixture-kb", "electricity", "faraday"): ["be discovered by"],
    ("fixture-kb", "electrons", "nucleus"): ["revolve around", "orbit"],
    ("fixture-kb", "nucleus", "electrons"): ["attract", "pull"],
    ("fixture-kb", "earth", "gravity"): ["generate", "carry"],
    ("fixture-kb", "gravity", "earth"): ["flow through"],
    ("fixture-kb", "newton", "gravity"): ["discovered", "study"],
    ("fixture-kb", "gravity", "newton"): ["be discovered by"],
    ("fixture-kb", "earth", "sun"): ["revolve around", "orbit"],
    ("fixture-kb", "sun", "earth"): ["attract", "pull"],
}

ATOM_TRIPLES = [
    ("earth", "revolve around", "sun"),
    ("earth", "orbit", "sun"),
    ("sun", "attract", "earth"),
    ("earth", "revolve around", "moon"),
]


def build_atom() -> Snapshot:
    snap = Snapshot(created_at="2026-01-01T00:00:00+00:00")
    fill_snapshot(snap, ATOM_ENTITIES, ATOM_RELATIONS, ["fixture-kb"])
    return snap


EVAL_EXTRA_RELATIONS = {
    # p2: answer:riddle :: key:lock (2x2)
    ("fixture-kb", "riddle", "answer"): ["be opened by", "be solved by"],
    ("fixture-kb", "answer", "riddle"): ["unlock", "open"],
    ("fixture-kb", "lock", "key"): ["be opened by", "be solved by"],
    ("fixture-kb", "key", "lock"): ["unlock", "open"],
    # p3: chef/meal/salt -> baker/cake/sugar
    ("fixture-kb", "chef", "meal"): ["prepare", "make"],
    ("fixture-kb", "meal", "chef"): ["be made by"],
    ("fixture-kb", "salt", "meal"): ["flavor", "be added to"],
    ("fixture-kb", "chef", "salt"): ["sprinkle", "measure"],
    ("fixture-kb", "baker", "cake"): ["prepare", "make"],
    ("fixture-kb", "cake", "baker"): ["be made by"],
    ("fixture-kb", "sugar", "cake"): ["flavor", "be added to"],
    ("fixture-kb", "baker", "sugar"): ["sprinkle", "measure"],
    # p4: stylist/hair/gel -> landscaper/lawn/fertilizer
    ("fixture-kb", "stylist", "hair"): ["groom", "trim"],
    ("fixture-kb", "gel", "hair"): ["be applied to", "strengthen"],
    ("fixture-kb", "stylist", "gel"): ["spread", "rub in"],
    ("fixture-kb", "landscaper", "lawn"): ["groom", "trim"],
    ("fixture-kb", "fertilizer", "lawn"): ["be applied to", "strengthen"],
    ("fixture-kb", "landscaper", "fertilizer"): ["spread", "rub in"],
    # p5: sun/summer/sunscreen -> rain/winter/umbrella
    ("fixture-kb", "sun", "summer"): ["be common in", "define"],
    ("fixture-kb", "sunscreen", "sun"): ["protect from", "block"],
    ("fixture-kb", "sunscreen", "summer"): ["be used in"],
    ("fixture-kb", "rain", "winter"): ["be common in", "define"],
    ("fixture-kb", "umbrella", "rain"): ["protect from", "block"],
    ("fixture-kb", "umbrella", "winter"): ["be used in"],
}

EVAL_DOMAINS = [
    SOLAR_BASE, SOLAR_TARGET,
    ["answer", "riddle"], ["key", "lock"],
    ["chef", "meal", "salt"], ["baker", "cake", "sugar"],
    ["stylist", "hair", "gel"], ["landscaper", "lawn", "fertilizer"],
    ["sun", "summer", "sunscreen"], ["rain", "winter", "umbrella"],
]

EVAL_PROBLEMS = [
    {"id": "solar-atom", "category": "extended",
     "base": SOLAR_BASE, "target": SOLAR_TARGET,
     "gold": {"sun": "nucleus", "earth": "electrons",
              "gravity": "electric force", "solar system": "atom",
              "newton": "faraday"}},
    {"id": "riddle-lock", "category": "far", "quad": "answer:riddle::key:lock"},
    {"id": "chef-baker", "category": "near",
     "base": ["chef", "meal", "salt"], "target": ["baker", "cake", "sugar"],
     "gold": {"chef": "baker", "meal": "cake", "salt": "sugar"}},
    {"id": "stylist-landscaper", "category": "far",
     "base": ["stylist", "hair", "gel"],
     "target": ["landscaper", "lawn", "fertilizer"],
     "gold": {"stylist": "landscaper", "hair": "lawn", "gel": "fertilizer"}},
    {"id": "seasons", "category": "far",
     "base": ["sun", "summer", "sunscreen"],
     "target": ["rain", "winter", "umbrella"],
     "gold": {"sun": "rain", "summer": "winter", "sunscreen": "umbrella"}},
]


def build_eval() -> Snapshot:
    snap = Snapshot(created_at="2026-01-01T00:00:00+00:00")
    merged = dict(SOLAR_RELATIONS)
    merged.update(EVAL_EXTRA_RELATIONS)
    fill_snapshot(snap, EVAL_DOMAINS, merged, SOLAR_SOURCES)
    return snap


def write_triples(path: Path, triples: list[tuple[str, str, str]]) -> None:
    path.write_text("".join(f"{s}\t{p}\t{o}\n" for s, p, o in triples),
                    encoding="utf-8")
    idx = path.with_name(path.name + ".idx.json")
    if idx.exists():
        idx.unlink()


def main():
    import json

    DATA.mkdir(parents=True, exist_ok=True)
    build_solar().save(DATA / "solar_system.snapshot.jsonl")
    build_riddle().save(DATA / "suggest_riddle.snapshot.jsonl")
    write_triples(DATA / "suggest_riddle.triples.tsv", RIDDLE_TRIPLES)
    build_atom().save(DATA / "suggest_atom.snapshot.jsonl")
    write_triples(DATA / "suggest_atom.triples.tsv", ATOM_TRIPLES)
    build_eval().save(DATA / "eval.snapshot.jsonl")
    (DATA / "eval_problems.json").write_text(
        json.dumps(EVAL_PROBLEMS, indent=2) + "\n", encoding="utf-8")
    print(f"fixtures written to {DATA}")


if __name__ == "__main__":
    main()
