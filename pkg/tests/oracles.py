"""Independent reference implementations used to check the engine.

Everything here is deliberately brute force and shares no code with the
package: exhaustive enumeration of partial injections, exhaustive bipartite
matching, and a from-scratch reimplementation of the documented hashed
trigram embedding scheme.
"""

import hashlib
import itertools

import numpy as np


def enumerate_partial_injections(base: list, target: list,
                                 forbid_size_one: bool = True):
    """All partial injective mappings base -> target as frozensets of
    (base, target) pairs, including the empty mapping."""
    for size in range(len(base) + 1):
        if forbid_size_one and size == 1:
            continue
        for chosen in itertools.combinations(base, size):
            for images in itertools.permutations(target, size):
                yield frozenset(zip(chosen, images))


def count_partial_injections(n: int, m: int,
                             forbid_size_one: bool = True) -> int:
    return sum(1 for _ in enumerate_partial_injections(
        list(range(n)), list(range(m)), forbid_size_one))


def brute_force_matching_weight(weights: np.ndarray) -> float:
    """Maximum total weight over all matchings of a bipartite weight matrix."""
    rows, cols = weights.shape
    if rows > cols:
        return brute_force_matching_weight(weights.T)
    best = 0.0
    for chosen in itertools.permutations(range(cols), rows):
        best = max(best, sum(weights[i, j] for i, j in enumerate(chosen)))
    # partial matchings never beat a full one here because weights are >= 0
    return float(best)


def brute_force_best_mapping(base_names: list[str], target_names: list[str],
                             pair_score) -> tuple[frozenset, float]:
    """Exhaustive optimum of the relational objective.

    ``pair_score(b1, b2, t1, t2)`` must be the two-direction pair score for
    mapping b1 -> t1 and b2 -> t2.
    """
    best_set, best_score = frozenset(), 0.0
    for mapping in enumerate_partial_injections(base_names, target_names):
        pairs = sorted(mapping)
        score = sum(pair_score(b1, b2, t1, t2)
                    for (b1, t1), (b2, t2) in itertools.combinations(pairs, 2))
        if score > best_score:
            best_set, best_score = mapping, score
    return best_set, best_score


def reference_trigram_vector(text: str, dimension: int = 256,
                             seed: bytes = b"relmap-v1") -> np.ndarray:
    """Reimplementation of the documented hashed-trigram embedding scheme."""
    padded = " " + text + " "
    vec = np.zeros(dimension)
    for start in range(len(padded) - 2):
        trigram = padded[start:start + 3]
        digest = hashlib.blake2b(trigram.encode("utf-8"), digest_size=8,
                                 key=seed).digest()
        value = int.from_bytes(digest, byteorder="big")
        coordinate = (value >> 1) % dimension
        vec[coordinate] += 1.0 if value % 2 == 0 else -1.0
    norm = np.linalg.norm(vec)
    if norm == 0:
        vec[0] = 1.0
        norm = 1.0
    return vec / norm
