"""Pair correspondence scoring: relation clustering, the bipartite cluster
graph, and exact maximum-weight matching.

A candidate correspondence of a base entity pair with a target entity pair
is scored per direction: cluster each side's relation phrases (so
paraphrases are not double-counted), connect clusters by their best
member-pair similarity, take an exact maximum-weight bipartite matching,
and sum the top retained edges.  The two directed scores add up to the
final pair score.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .model import (Entity, MatchEvidence, PairSimilarity, RelationPhrase,
                    RelationSet, normalize_phrase)
from .similarity import Stoplist, phrase_similarity
from .sources import RelationIndex


@dataclass(frozen=True)
class ScoringParams:
    sim_threshold: float = 0.2
    cluster_threshold: float = 0.5
    top_k: int = 3

    def __post_init__(self):
        if not 0.0 < self.cluster_threshold <= 1.0:
            raise ValueError("cluster_threshold must be in (0, 1]")
        if self.top_k < 1:
            raise ValueError("top_k must be at least 1")


@dataclass(frozen=True)
class RelationCluster:
    members: tuple[RelationPhrase, ...]
    representative: str
    side: str  # "base" or "target"

    @property
    def texts(self) -> tuple[str, ...]:
        return tuple(p.text for p in self.members)


def cluster_relations(phrases: list[RelationPhrase], provider,
                      distance_threshold: float,
                      side: str = "base") -> list[RelationCluster]:
    """Average-linkage agglomerative clustering on 1 - cosine distance.

    Merging stops once the closest cluster pair is farther apart than the
    threshold.  Ties are broken by merging the pair whose (lexicographically
    smallest member) labels compare smallest, so the result is independent
    of input order.
    """
    unique: dict[str, RelationPhrase] = {}
    for p in phrases:
        key = normalize_phrase(p.text)
        if key and key not in unique:
            unique[key] = p
    texts = sorted(unique)
    if not texts:
        return []

    vectors = np.stack([provider.embed(t) for t in texts])
    cosines = vectors @ vectors.T
    distances = 1.0 - cosines

    clusters: list[list[int]] = [[i] for i in range(len(texts))]
    while len(clusters) > 1:
        best: Optional[tuple[float, tuple[str, str], int, int]] = None
        for a in range(len(clusters)):
            for b in range(a + 1, len(clusters)):
                dist = float(np.mean(
                    [distances[i][j] for i in clusters[a] for j in clusters[b]]))
                label = tuple(sorted((texts[min(clusters[a])],
                                      texts[min(clusters[b])])))
                cand = (dist, label, a, b)
                if best is None or cand[:2] < best[:2]:
                    best = cand
        dist, _, a, b = best
        if dist > distance_threshold:
            break
        clusters[a] = sorted(clusters[a] + clusters[b])
        del clusters[b]

    out = []
    for members_idx in clusters:
        members = tuple(unique[texts[i]] for i in members_idx)
        out.append(RelationCluster(members=members,
                                   representative=_representative(
                                       members_idx, texts, cosines),
                                   side=side))
    out.sort(key=lambda c: c.representative)
    return out


def _representative(members_idx: list[int], texts: list[str],
                    cosines: np.ndarray) -> str:
    """Member with the highest mean cosine to the rest (centroid proxy)."""
    if len(members_idx) == 1:
        return texts[members_idx[0]]
    best_text, best_score = None, -np.inf
    for i in members_idx:
        score = float(np.mean([cosines[i][j] for j in members_idx if j != i]))
        if score > best_score or (score == best_score
                                  and texts[i] < best_text):
            best_text, best_score = texts[i], score
    return best_text


@dataclass(frozen=True)
class ClusterGraph:
    base_clusters: tuple[RelationCluster, ...]
    target_clusters: tuple[RelationCluster, ...]
    edges: np.ndarray  # shape (len(base_clusters), len(target_clusters))


def build_cluster_graph(base_phrases: list[RelationPhrase],
                        target_phrases: list[RelationPhrase],
                        provider, stoplist: Optional[Stoplist],
                        params: ScoringParams) -> ClusterGraph:
    base = cluster_relations(base_phrases, provider,
                             params.cluster_threshold, side="base")
    target = cluster_relations(target_phrases, provider,
                               params.cluster_threshold, side="target")
    edges = np.zeros((len(base), len(target)))
    for i, cb in enumerate(base):
        for j, ct in enumerate(target):
            edges[i, j] = max(
                (phrase_similarity(pb.text, pt.text, provider, stoplist,
                                   params.sim_threshold)
                 for pb in cb.members for pt in ct.members),
                default=0.0)
    return ClusterGraph(tuple(base), tuple(target), edges)


def matched_edges(graph: ClusterGraph) -> list[tuple[int, int, float]]:
    """Exact maximum-weight bipartite matching; zero-weight edges excluded."""
    if not graph.base_clusters or not graph.target_clusters:
        return []
    rows, cols = linear_sum_assignment(graph.edges, maximize=True)
    out = [(int(i), int(j), float(graph.edges[i, j]))
           for i, j in zip(rows, cols) if graph.edges[i, j] > 0.0]
    out.sort(key=lambda e: (-e[2], graph.base_clusters[e[0]].representative,
                            graph.target_clusters[e[1]].representative))
    return out


def directional_sim(r_base: RelationSet, r_target: RelationSet, provider,
                    stoplist: Optional[Stoplist], params: ScoringParams,
                    direction: str = "forward"
                    ) -> tuple[float, list[MatchEvidence]]:
    """Similarity of two directed relation sets: top matched cluster edges."""
    if len(r_base) == 0 or len(r_target) == 0:
        return 0.0, []
    graph = build_cluster_graph(list(r_base.relations),
                                list(r_target.relations),
                                provider, stoplist, params)
    retained = matched_edges(graph)[:params.top_k]
    evidence = [MatchEvidence(direction=direction,
                              base_label=graph.base_clusters[i].representative,
                              target_label=graph.target_clusters[j].representative,
                              weight=w)
                for i, j, w in retained]
    return float(sum(w for _, _, w in retained)), evidence


def matching_weight(r_base: RelationSet, r_target: RelationSet, provider,
                    stoplist: Optional[Stoplist],
                    params: ScoringParams) -> float:
    """Full matching weight before top-k truncation (for monotonicity checks)."""
    if len(r_base) == 0 or len(r_target) == 0:
        return 0.0
    graph = build_cluster_graph(list(r_base.relations),
                                list(r_target.relations),
                                provider, stoplist, params)
    return float(sum(w for _, _, w in matched_edges(graph)))


def sim_star(b1: Entity, b2: Entity, t1: Entity, t2: Entity,
             index: RelationIndex, provider,
             stoplist: Optional[Stoplist],
             params: ScoringParams) -> PairSimilarity:
    """Two-direction pair correspondence score.

    sim_star(b1,b2,t1,t2) equals sim_star(b2,b1,t2,t1) exactly: swapping
    both pairs only exchanges the forward and backward terms.
    """
    if b1 == b2 or t1 == t2:
        raise ValueError("pair entities must be distinct")
    fwd_score, fwd_ev = directional_sim(index.get(b1, b2), index.get(t1, t2),
                                        provider, stoplist, params,
                                        direction="forward")
    bwd_score, bwd_ev = directional_sim(index.get(b2, b1), index.get(t2, t1),
                                        provider, stoplist, params,
                                        direction="backward")
    return PairSimilarity(base_pair=(b1, b2), target_pair=(t1, t2),
                          score=fwd_score + bwd_score,
                          evidence=tuple(fwd_ev + bwd_ev))


def explain_quadruple(b1: Entity, b2: Entity, t1: Entity, t2: Entity,
                      index: RelationIndex, provider,
                      stoplist: Optional[Stoplist],
                      params: ScoringParams) -> dict:
    """Debug dump (clusters, edges, matching) for one quadruple."""
    result = {"base_pair": [b1.name, b2.name],
              "target_pair": [t1.name, t2.name],
              "directions": []}
    total = 0.0
    for direction, (rb, rt) in (("forward", (index.get(b1, b2), index.get(t1, t2))),
                                ("backward", (index.get(b2, b1), index.get(t2, t1)))):
        entry = {"direction": direction,
                 "base_relations": list(rb.texts),
                 "target_relations": list(rt.texts),
                 "base_clusters": [], "target_clusters": [],
                 "edges": [], "matched": [], "score": 0.0}
        if len(rb) and len(rt):
            graph = build_cluster_graph(list(rb.relations), list(rt.relations),
                                        provider, stoplist, params)
            entry["base_clusters"] = [
                {"representative": c.representative, "members": list(c.texts)}
                for c in graph.base_clusters]
            entry["target_clusters"] = [
                {"representative": c.representative, "members": list(c.texts)}
                for c in graph.target_clusters]
            entry["edges"] = [
                {"base": graph.base_clusters[i].representative,
                 "target": graph.target_clusters[j].representative,
                 "weight": float(graph.edges[i, j])}
                for i in range(len(graph.base_clusters))
                for j in range(len(graph.target_clusters))
                if graph.edges[i, j] > 0.0]
            retained = matched_edges(graph)[:params.top_k]
            entry["matched"] = [
                {"base": graph.base_clusters[i].representative,
                 "target": graph.target_clusters[j].representative,
                 "weight": w}
                for i, j, w in retained]
            entry["score"] = float(sum(w for _, _, w in retained))
        total += entry["score"]
        result["directions"].append(entry)
    result["score"] = total
    return result
