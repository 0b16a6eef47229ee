import itertools

import numpy as np
import pytest

from relmap.model import Mapping, PairSimilarity, normalize_entity
from relmap.search import (PairTable, SearchConfig, beam_search,
                           objective_score, score_all_pairs, solve)
from relmap.sources import RelationIndex

from conftest import make_entities
from oracles import brute_force_best_mapping
from test_scoring import index_from


def table_from_scores(base_names, target_names, scores):
    """PairTable from {(b1, b2, t1, t2): score} with b1 < b2."""
    base = make_entities(*base_names)
    target = make_entities(*target_names)
    table = PairTable(base, target)
    by_name = {e.name: e for e in base + target}
    for (b1, b2, t1, t2), score in scores.items():
        table.put(PairSimilarity(base_pair=(by_name[b1], by_name[b2]),
                                 target_pair=(by_name[t1], by_name[t2]),
                                 score=score, evidence=()))
    return table


def random_table(rng, n, m, sparsity=0.5):
    base_names = [f"b{i}" for i in range(n)]
    target_names = [f"t{j}" for j in range(m)]
    scores = {}
    for b1, b2 in itertools.combinations(base_names, 2):
        for t1, t2 in itertools.permutations(target_names, 2):
            if rng.random() > sparsity:
                scores[(b1, b2, t1, t2)] = float(rng.random())
    return table_from_scores(base_names, target_names, scores)


class TestPairTable:
    def test_swap_symmetric_lookup(self):
        table = table_from_scores(["a", "b"], ["x", "y"],
                                  {("a", "b", "x", "y"): 1.5})
        assert table.score("a", "b", "x", "y") == 1.5
        assert table.score("b", "a", "y", "x") == 1.5
        assert table.score("a", "b", "y", "x") == 0.0

    def test_score_all_pairs_counts(self, provider):
        base = make_entities("a", "b")
        target = make_entities("x", "y")
        table = score_all_pairs(base, target, RelationIndex(), provider, None,
                                SearchConfig())
        assert len(table) == 2
        base3 = make_entities("a", "b", "c")
        target3 = make_entities("x", "y", "z")
        table3 = score_all_pairs(base3, target3, RelationIndex(), provider,
                                 None, SearchConfig())
        assert len(table3) == 18

    def test_too_small_instance_rejected(self, provider):
        with pytest.raises(ValueError):
            score_all_pairs(make_entities("a"), make_entities("x", "y"),
                            RelationIndex(), provider, None, SearchConfig())


class TestBeamSearch:
    def test_empty_table_yields_empty_mapping(self):
        table = table_from_scores(["a", "b"], ["x", "y"], {})
        ranked = beam_search(table, SearchConfig())
        assert len(ranked) == 1
        assert len(ranked[0]) == 0
        assert ranked[0].total_score == 0.0
        assert {e.name for e in ranked[0].unmapped_base} == {"a", "b"}

    def test_simple_two_by_two(self):
        table = table_from_scores(["a", "b"], ["x", "y"],
                                  {("a", "b", "x", "y"): 2.0,
                                   ("a", "b", "y", "x"): 0.5})
        best = beam_search(table, SearchConfig())[0]
        assert best.assignments == frozenset({("a", "x"), ("b", "y")})
        assert best.total_score == 2.0

    def test_zero_gain_entity_stays_unmapped(self):
        # "c" has no positive pair score with anything, so the best
        # mapping realizes a partial solution and leaves it out
        table = table_from_scores(["a", "b", "c"], ["x", "y", "z"],
                                  {("a", "b", "x", "y"): 2.0})
        best = beam_search(table, SearchConfig())[0]
        assert best.assignments == frozenset({("a", "x"), ("b", "y")})
        assert {e.name for e in best.unmapped_base} == {"c"}
        assert {e.name for e in best.unmapped_target} == {"z"}

    def test_matches_exhaustive_on_random_instances(self):
        rng = np.random.default_rng(13)
        for trial in range(40):
            n, m = rng.integers(2, 5, size=2)
            table = random_table(rng, int(n), int(m))
            _, expected = brute_force_best_mapping(
                [e.name for e in table.base], [e.name for e in table.target],
                table.score)
            got = beam_search(table, SearchConfig(beam_width=200))[0]
            assert got.total_score == pytest.approx(expected), \
                f"trial {trial}: beam {got.total_score} vs {expected}"

    def test_reported_scores_match_objective(self):
        rng = np.random.default_rng(29)
        table = random_table(rng, 4, 4)
        for mapping in beam_search(table, SearchConfig()):
            assert mapping.total_score == pytest.approx(
                objective_score(mapping, table), abs=1e-9)

    def test_ranked_scores_monotone(self):
        rng = np.random.default_rng(31)
        table = random_table(rng, 4, 5)
        ranked = beam_search(table, SearchConfig())
        scores = [m.total_score for m in ranked]
        assert scores == sorted(scores, reverse=True)

    def test_width_one_is_greedy_and_still_valid(self):
        rng = np.random.default_rng(37)
        table = random_table(rng, 4, 4)
        ranked = beam_search(table, SearchConfig(beam_width=1))
        assert len(ranked) == 1
        assert ranked[0].total_score == pytest.approx(
            objective_score(ranked[0], table))

    def test_deterministic_across_runs(self):
        rng = np.random.default_rng(41)
        table = random_table(rng, 4, 4)
        a = beam_search(table, SearchConfig())
        b = beam_search(table, SearchConfig())
        assert [m.assignments for m in a] == [m.assignments for m in b]

    def test_results_are_valid_mappings(self):
        rng = np.random.default_rng(43)
        table = random_table(rng, 5, 4)
        for mapping in beam_search(table, SearchConfig()):
            assert isinstance(mapping, Mapping)
            assert len(mapping) != 1


class TestSolve:
    def test_end_to_end_on_tiny_instance(self, provider):
        index = index_from({("a", "b"): ["orbit"], ("x", "y"): ["orbit"]})
        ranked, table = solve(make_entities("a", "b"),
                              make_entities("x", "y"), index, provider, None,
                              SearchConfig())
        assert ranked[0].assignments == frozenset({("a", "x"), ("b", "y")})
        assert ranked[0].total_score == pytest.approx(1.0)
        assert table.score("a", "b", "x", "y") == pytest.approx(1.0)


class TestSearchConfig:
    def test_invalid_beam_width(self):
        with pytest.raises(ValueError):
            SearchConfig(beam_width=0)

    def test_scoring_params_mirror_config(self):
        cfg = SearchConfig(top_k_clusters=5, sim_threshold=0.3,
                           cluster_threshold=0.6)
        params = cfg.scoring
        assert (params.top_k, params.sim_threshold,
                params.cluster_threshold) == (5, 0.3, 0.6)
