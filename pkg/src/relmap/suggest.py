"""Open-world entity suggestion for unmapped base entities.

For an unmapped base entity b*, every relation it shares with a mapped
base entity b_i is replayed against the image of b_i on the target side:
triple stores are filtered on the predicate field, autocomplete queries
put the relation text where the wildcard used to be.  Harvested names are
clustered, tiny clusters are dropped, and each surviving cluster is judged
by rerunning the full mapping engine with a candidate added to the target
set.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Optional

from .model import Entity, InvalidEntityError, Mapping, RelationPhrase, normalize_entity
from .scoring import cluster_relations
from .search import SearchConfig, solve
from .similarity import Stoplist
from .sources import (AutocompleteSource, RelationIndex, RelationSource,
                      Snapshot, SourceKind, TripleStoreSource, extract_relations)

log = logging.getLogger(__name__)

MAX_HARVESTED_NAMES = 200


@dataclass(frozen=True)
class SuggestionCandidate:
    cluster_members: tuple[str, ...]
    representative: str
    best_entity: str
    best_mapping: Mapping
    score: float


def harvest_candidates(b_unmapped: Entity, mapping: Mapping,
                       index: RelationIndex,
                       sources: Iterable[RelationSource]) -> list[str]:
    """Multiset of target-side entity names playing the roles b_unmapped
    plays on the base side."""
    if len(mapping) == 0:
        return []
    sources = [s for s in sources
               if s.kind in (SourceKind.TRIPLE_LOOKUP,
                             SourceKind.CONCEPT_GRAPH_API,
                             SourceKind.AUTOCOMPLETE)]
    names: list[str] = []
    for b_i, t_i in mapping.pairs:
        # forward: (b_i, r, b*) patterns become (t_i, r, ?)
        for phrase in index.get(b_i, b_unmapped).relations:
            names.extend(_query_entities(sources, t_i, phrase.text,
                                         anchor_is_subject=True))
        # backward: (b*, r, b_i) patterns become (?, r, t_i)
        for phrase in index.get(b_unmapped, b_i).relations:
            names.extend(_query_entities(sources, t_i, phrase.text,
                                         anchor_is_subject=False))
        if len(names) >= MAX_HARVESTED_NAMES:
            break
    return names[:MAX_HARVESTED_NAMES]


def _query_entities(sources: list[RelationSource], anchor: Entity,
                    relation: str, anchor_is_subject: bool) -> list[str]:
    out: list[str] = []
    for source in sources:
        try:
            if isinstance(source, TripleStoreSource):
                if anchor_is_subject:
                    out.extend(source.objects_for(anchor, relation))
                else:
                    out.extend(source.subjects_for(anchor, relation))
            elif isinstance(source, AutocompleteSource):
                out.extend(_autocomplete_entities(source, anchor, relation,
                                                  anchor_is_subject))
        except Exception as exc:  # noqa: BLE001 - suggestion sources are best effort
            log.warning("suggestion source %s failed: %s", source.id, exc)
    return out


def _autocomplete_entities(source: AutocompleteSource, anchor: Entity,
                           relation: str, anchor_is_subject: bool) -> list[str]:
    """Ask completion queries with the relation text filled in, keeping the
    trailing text as a candidate entity name."""
    if not anchor_is_subject:
        return []  # completions only extend to the right of the query
    out: list[str] = []
    for question in source.questions:
        for hs in anchor.surface_forms:
            query = f"{question} {hs} {relation}"
            try:
                completions = source.complete(query)
            except Exception:  # noqa: BLE001
                continue
            for completion in completions:
                norm = completion.strip().lower()
                if norm.startswith(query) and len(norm) > len(query):
                    candidate = norm[len(query):].strip()
                    # drop a leading article from the captured entity
                    for article in ("a ", "an ", "the "):
                        if candidate.startswith(article):
                            candidate = candidate[len(article):]
                            break
                    if candidate:
                        out.append(candidate)
    return out


def suggest(b_unmapped: Entity, mapping: Mapping, index: RelationIndex,
            base: list[Entity], target: list[Entity],
            relation_sources: list[RelationSource],
            suggestion_sources: list[RelationSource],
            snapshot: Snapshot, provider, stoplist: Optional[Stoplist],
            config: SearchConfig, live: bool = False
            ) -> list[SuggestionCandidate]:
    """Ranked suggestion clusters for one unmapped base entity.

    Each surviving cluster is scored by rerunning the matching engine with
    its representative added to the target set; the top cluster gets one
    final round where every member is tried individually.
    """
    if b_unmapped.name not in {e.name for e in mapping.unmapped_base}:
        raise ValueError(f"{b_unmapped.name!r} is not unmapped in this mapping")
    harvested = harvest_candidates(b_unmapped, mapping, index,
                                   suggestion_sources)
    normalized: list[str] = []
    for name in harvested:
        try:
            normalized.append(normalize_entity(name).name)
        except InvalidEntityError:
            continue
    if not normalized:
        return []

    clusters = _cluster_names(normalized, provider, config.cluster_threshold)
    clusters = [c for c in clusters if len(c) >= 2]
    if not clusters:
        return []

    scored: list[SuggestionCandidate] = []
    for members in clusters:
        representative = _closest_to_center(members, provider)
        result = _rerun_with(representative, b_unmapped, base, target,
                             relation_sources, snapshot, provider, stoplist,
                             config, live)
        if result is None:
            continue
        best, score = result
        scored.append(SuggestionCandidate(
            cluster_members=tuple(sorted(set(members))),
            representative=representative, best_entity=representative,
            best_mapping=best, score=score))
    if not scored:
        return []
    scored.sort(key=lambda c: (-c.score, c.representative))

    # final round: try every member of the winning cluster individually
    top = scored[0]
    best_member, best_result = top.best_entity, (top.best_mapping, top.score)
    for member in top.cluster_members:
        if member == top.representative:
            continue
        result = _rerun_with(member, b_unmapped, base, target,
                             relation_sources, snapshot, provider, stoplist,
                             config, live)
        if result is not None and result[1] > best_result[1]:
            best_member, best_result = member, result
    scored[0] = SuggestionCandidate(
        cluster_members=top.cluster_members, representative=top.representative,
        best_entity=best_member, best_mapping=best_result[0],
        score=best_result[1])
    return scored


def _cluster_names(names: list[str], provider,
                   distance_threshold: float) -> list[list[str]]:
    """Cluster candidate names with the same machinery as relation phrases,
    then re-expand duplicates so frequency still counts toward cluster size."""
    counts: dict[str, int] = {}
    for n in names:
        counts[n] = counts.get(n, 0) + 1
    phrase_clusters = cluster_relations(
        [RelationPhrase(n) for n in counts], provider, distance_threshold)
    out = []
    for cluster in phrase_clusters:
        expanded: list[str] = []
        for text in cluster.texts:
            expanded.extend([text] * counts[text])
        out.append(expanded)
    return out


def _closest_to_center(members: list[str], provider) -> str:
    import numpy as np

    unique = sorted(set(members))
    if len(unique) == 1:
        return unique[0]
    vectors = np.stack([provider.embed(m) for m in unique])
    center = vectors.mean(axis=0)
    sims = vectors @ center
    return unique[int(np.argmax(sims))]


def _rerun_with(candidate_name: str, b_unmapped: Entity,
                base: list[Entity], target: list[Entity],
                relation_sources: list[RelationSource], snapshot: Snapshot,
                provider, stoplist: Optional[Stoplist], config: SearchConfig,
                live: bool) -> Optional[tuple[Mapping, float]]:
    """Rerun the matching engine with the candidate added to the target set;
    keep the best mapping that actually maps b_unmapped to the candidate."""
    try:
        candidate = normalize_entity(candidate_name)
    except InvalidEntityError:
        return None
    if candidate.name in {e.name for e in target + base}:
        return None
    extended_target = list(target) + [candidate]
    index = RelationIndex.build(base, extended_target, relation_sources,
                                snapshot, live=live)
    ranked, _ = solve(base, extended_target, index, provider, stoplist, config)
    for mapping in ranked:
        if mapping.image_of(b_unmapped.name) == candidate.name:
            return mapping, mapping.total_score
    return None
