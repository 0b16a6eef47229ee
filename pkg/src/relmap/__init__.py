"""Relational analogy mapping between two entity sets.

Given only the names of base and target entities, the engine extracts
commonsense relations between intra-domain pairs from pluggable sources,
scores cross-domain correspondences by relational similarity, and builds
an interpretable partial mapping via beam search, with suggestions for
entities left unmapped.
"""

from .model import (DomainTag, Entity, InvalidEntityError, Mapping,
                    MappingError, MatchEvidence, PairSimilarity,
                    RelationPhrase, RelationSet, normalize_entity,
                    solution_space_size)
from .scoring import ScoringParams, cluster_relations, directional_sim, sim_star
from .search import PairTable, SearchConfig, beam_search, objective_score, score_all_pairs, solve
from .similarity import (FileCachedProvider, HashedNgramEmbedder,
                         RemoteEmbeddingProvider, Stoplist, phrase_similarity)
from .sources import (AutocompleteSource, GenerativeSource, LocalKBSource,
                      RelationIndex, RelationSource, Snapshot,
                      SnapshotOnlySource, SourceKind, TripleStoreSource,
                      extract_relations)
from .suggest import SuggestionCandidate, harvest_candidates, suggest
from .evaluation import AnalogyProblem, EvalReport, evaluate, guess_level, load_problems

__version__ = "0.1.0"
