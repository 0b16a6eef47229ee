"""Beam search over partial injective mappings.

The beam is seeded with the highest-scoring pair-mappings (two base
entities fixed onto two target entities at once).  Each iteration extends
every retained state by one consistent single-entity assignment whose
incremental score is strictly positive; zero-gain extensions are never
taken, which is exactly how entities without relational evidence end up
unmapped.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Optional

from .model import Entity, Mapping, PairSimilarity
from .scoring import ScoringParams, sim_star
from .similarity import Stoplist
from .sources import RelationIndex

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchConfig:
    beam_width: int = 20
    top_k_clusters: int = 3
    sim_threshold: float = 0.2
    cluster_threshold: float = 0.5

    def __post_init__(self):
        if self.beam_width < 1:
            raise ValueError("beam width must be at least 1")

    @property
    def scoring(self) -> ScoringParams:
        return ScoringParams(sim_threshold=self.sim_threshold,
                             cluster_threshold=self.cluster_threshold,
                             top_k=self.top_k_clusters)


class PairTable:
    """Complete table of pair-correspondence scores for one instance.

    Keys are canonicalized using pair-swap symmetry, so lookups work for
    either ordering of the base pair.
    """

    def __init__(self, base: list[Entity], target: list[Entity]):
        self.base = sorted(base, key=lambda e: e.name)
        self.target = sorted(target, key=lambda e: e.name)
        self._by_name = {e.name: e for e in self.base + self.target}
        self._scores: dict[tuple[str, str, str, str], PairSimilarity] = {}

    @staticmethod
    def _key(b1: str, b2: str, t1: str, t2: str) -> tuple[str, str, str, str]:
        if b1 > b2:
            b1, b2, t1, t2 = b2, b1, t2, t1
        return (b1, b2, t1, t2)

    def put(self, sim: PairSimilarity) -> None:
        b1, b2 = (e.name for e in sim.base_pair)
        t1, t2 = (e.name for e in sim.target_pair)
        self._scores[self._key(b1, b2, t1, t2)] = sim

    def lookup(self, b1: str, b2: str, t1: str, t2: str) -> Optional[PairSimilarity]:
        return self._scores.get(self._key(b1, b2, t1, t2))

    def score(self, b1: str, b2: str, t1: str, t2: str) -> float:
        sim = self.lookup(b1, b2, t1, t2)
        return sim.score if sim else 0.0

    def entity(self, name: str) -> Entity:
        return self._by_name[name]

    def __len__(self):
        return len(self._scores)


def score_all_pairs(base: list[Entity], target: list[Entity],
                    index: RelationIndex, provider,
                    stoplist: Optional[Stoplist],
                    config: SearchConfig) -> PairTable:
    """sim* for every unordered base pair against every ordered target pair."""
    if len(base) < 2 or len(target) < 2:
        raise ValueError("need at least 2 entities on each side")
    table = PairTable(base, target)
    params = config.scoring
    for b1, b2 in itertools.combinations(table.base, 2):
        for t1, t2 in itertools.permutations(table.target, 2):
            table.put(sim_star(b1, b2, t1, t2, index, provider, stoplist,
                               params))
    return table


@dataclass(frozen=True)
class BeamState:
    assignments: frozenset[tuple[str, str]]
    score: float
    history: tuple[tuple[str, str], ...] = ()

    def sort_key(self):
        return (-self.score, len(self.assignments),
                tuple(sorted(self.assignments)))


def objective_score(mapping: Mapping, table: PairTable) -> float:
    """The relational objective: sum of sim* over all mapped base pairs."""
    pairs = sorted(mapping.pairs, key=lambda bt: bt[0].name)
    total = 0.0
    for (b1, t1), (b2, t2) in itertools.combinations(pairs, 2):
        total += table.score(b1.name, b2.name, t1.name, t2.name)
    return total


def _increment(state: BeamState, table: PairTable, b_new: str,
               t_new: str) -> float:
    return sum(table.score(b, b_new, t, t_new)
               for b, t in state.assignments)


def _state_to_mapping(state: BeamState, table: PairTable) -> Mapping:
    pairs = tuple((table.entity(b), table.entity(t))
                  for b, t in sorted(state.assignments))
    mapped_b = {b for b, _ in state.assignments}
    mapped_t = {t for _, t in state.assignments}
    return Mapping(
        pairs=pairs,
        unmapped_base=tuple(e for e in table.base if e.name not in mapped_b),
        unmapped_target=tuple(e for e in table.target
                              if e.name not in mapped_t),
        total_score=state.score)


def beam_search(table: PairTable, config: SearchConfig) -> list[Mapping]:
    """Ranked mappings, best first, at most beam_width of them.

    Deterministic for a fixed table: candidate pools are reduced in
    canonical sorted order, duplicate states reached through different
    histories are merged, and ties break toward smaller mappings and
    lexicographically smaller assignment sets.
    """
    seeds: list[BeamState] = []
    for b1, b2 in itertools.combinations(table.base, 2):
        for t1, t2 in itertools.permutations(table.target, 2):
            score = table.score(b1.name, b2.name, t1.name, t2.name)
            if score > 0.0:
                assignment = frozenset({(b1.name, t1.name), (b2.name, t2.name)})
                seeds.append(BeamState(assignments=assignment, score=score,
                                       history=tuple(sorted(assignment))))
    if not seeds:
        empty = Mapping(pairs=(), unmapped_base=tuple(table.base),
                        unmapped_target=tuple(table.target), total_score=0.0)
        return [empty]

    seeds.sort(key=BeamState.sort_key)
    beam = _dedup(seeds)[:config.beam_width]
    base_names = [e.name for e in table.base]
    target_names = [e.name for e in table.target]

    while True:
        candidates = list(beam)
        for state in beam:
            used_b = {b for b, _ in state.assignments}
            used_t = {t for _, t in state.assignments}
            for b_new in base_names:
                if b_new in used_b:
                    continue
                for t_new in target_names:
                    if t_new in used_t:
                        continue
                    gain = _increment(state, table, b_new, t_new)
                    if gain <= 0.0:
                        continue
                    candidates.append(BeamState(
                        assignments=state.assignments | {(b_new, t_new)},
                        score=state.score + gain,
                        history=state.history + ((b_new, t_new),)))
        candidates.sort(key=BeamState.sort_key)
        new_beam = _dedup(candidates)[:config.beam_width]
        if [s.assignments for s in new_beam] == [s.assignments for s in beam]:
            break
        beam = new_beam

    return [_state_to_mapping(s, table) for s in beam]


def _dedup(states: list[BeamState]) -> list[BeamState]:
    seen: set[frozenset] = set()
    out = []
    for s in states:
        if s.assignments not in seen:
            seen.add(s.assignments)
            out.append(s)
    return out


def solve(base: list[Entity], target: list[Entity], index: RelationIndex,
          provider, stoplist: Optional[Stoplist],
          config: SearchConfig) -> tuple[list[Mapping], PairTable]:
    """Convenience wrapper: score all pairs, then run the beam search."""
    table = score_all_pairs(base, target, index, provider, stoplist, config)
    return beam_search(table, config), table
