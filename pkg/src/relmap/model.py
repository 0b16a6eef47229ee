"""Core vocabulary: entities, relation phrases, pair scores, mappings.

Everything here is immutable after construction so instances can be shared
freely across worker threads.
"""

from __future__ import annotations

import math
import re
import string
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional


class DomainTag(Enum):
    BASE = "base"
    TARGET = "target"


class InvalidEntityError(ValueError):
    """Raised when an entity name is empty after normalization."""


_WS = re.compile(r"\s+")

# suffixes that take "es" under the naive pluralization rule
_ES_SUFFIXES = ("s", "x", "z", "ch", "sh")


def normalize_text(raw: str) -> str:
    """Lowercase, trim, and collapse internal whitespace."""
    return _WS.sub(" ", raw.strip().lower())


def normalize_phrase(raw: str) -> str:
    """Normalization for relation phrases: edge punctuation is stripped too."""
    text = normalize_text(raw)
    return text.strip(string.punctuation + " ")


@dataclass(frozen=True, eq=False)
class Entity:
    """A normalized noun-phrase name plus the surface forms used for queries.

    Equality and hashing are by normalized name only; case and surrounding
    whitespace are never significant.
    """

    name: str
    surface_forms: tuple[str, ...]
    domain_tag: Optional[DomainTag] = None

    def __eq__(self, other):
        return isinstance(other, Entity) and self.name == other.name

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return f"Entity({self.name!r})"


def normalize_entity(raw: str, domain_tag: Optional[DomainTag] = None) -> Entity:
    """Build an Entity with naive singular/plural surface-form variants.

    The variants only need to cover "single or plural form" source queries,
    so suffix rules are deliberately naive: a trailing "s" is stripped for
    the singular guess, and "s"/"es" is appended for the plural guess.
    """
    name = normalize_text(raw)
    if not name:
        raise InvalidEntityError(f"entity name is empty after normalization: {raw!r}")
    forms = [name]
    if name.endswith("s"):
        singular = name[:-1]
        if singular:
            forms.append(singular)
    else:
        suffix = "es" if name.endswith(_ES_SUFFIXES) else "s"
        forms.append(name + suffix)
    return Entity(name=name, surface_forms=tuple(forms), domain_tag=domain_tag)


@dataclass(frozen=True)
class RelationPhrase:
    """A short predicate phrase holding between an ordered entity pair."""

    text: str
    source: str = ""
    weight_hint: Optional[float] = None

    def __post_init__(self):
        if not self.text or self.text != self.text.strip():
            raise ValueError(f"malformed relation phrase: {self.text!r}")
        if self.weight_hint is not None and self.weight_hint < 0:
            raise ValueError("weight_hint must be nonnegative")


@dataclass(frozen=True)
class RelationSet:
    """The relations extracted for one *directed* entity pair.

    Direction matters: the relations of (a, b) and (b, a) are distinct
    objects and are never merged.  Phrases are deduplicated by normalized
    text and kept in canonical sorted order so parallel extraction schedules
    cannot change the result.
    """

    head: Entity
    tail: Entity
    relations: tuple[RelationPhrase, ...] = ()

    def __post_init__(self):
        if self.head == self.tail:
            raise ValueError("relation set head and tail must differ")

    @classmethod
    def build(cls, head: Entity, tail: Entity,
              phrases: Iterable[RelationPhrase]) -> "RelationSet":
        seen: dict[str, RelationPhrase] = {}
        for p in phrases:
            key = normalize_phrase(p.text)
            if key and key not in seen:
                seen[key] = RelationPhrase(key, p.source, p.weight_hint)
        ordered = tuple(seen[k] for k in sorted(seen))
        return cls(head=head, tail=tail, relations=ordered)

    @property
    def texts(self) -> tuple[str, ...]:
        return tuple(p.text for p in self.relations)

    def __len__(self):
        return len(self.relations)


@dataclass(frozen=True)
class MatchEvidence:
    """One retained matched-cluster edge backing a pair score."""

    direction: str  # "forward" or "backward"
    base_label: str
    target_label: str
    weight: float


@dataclass(frozen=True)
class PairSimilarity:
    """The scored correspondence of a base entity pair with a target pair."""

    base_pair: tuple[Entity, Entity]
    target_pair: tuple[Entity, Entity]
    score: float
    evidence: tuple[MatchEvidence, ...] = ()

    def __post_init__(self):
        if self.score < 0:
            raise ValueError("pair similarity score must be nonnegative")


class MappingError(ValueError):
    """Raised when a mapping violates its structural invariants."""


@dataclass(frozen=True)
class Mapping:
    """A partial injective function from base entities to target entities.

    Mappings of size 1 are disallowed; entities without relational evidence
    stay unmapped and contribute nothing to the total score.
    """

    pairs: tuple[tuple[Entity, Entity], ...]
    unmapped_base: tuple[Entity, ...] = ()
    unmapped_target: tuple[Entity, ...] = ()
    total_score: float = 0.0

    def __post_init__(self):
        if len(self.pairs) == 1:
            raise MappingError("mappings of size 1 are disallowed")
        bases = [b.name for b, _ in self.pairs]
        targets = [t.name for _, t in self.pairs]
        if len(set(bases)) != len(bases):
            raise MappingError("base entity mapped more than once")
        if len(set(targets)) != len(targets):
            raise MappingError("two base entities mapped to the same target")
        if self.total_score < 0:
            raise MappingError("total score must be nonnegative")
        object.__setattr__(
            self, "pairs",
            tuple(sorted(self.pairs, key=lambda bt: bt[0].name)))

    @property
    def assignments(self) -> frozenset[tuple[str, str]]:
        return frozenset((b.name, t.name) for b, t in self.pairs)

    def image_of(self, base_name: str) -> Optional[str]:
        for b, t in self.pairs:
            if b.name == base_name:
                return t.name
        return None

    def __len__(self):
        return len(self.pairs)


def solution_space_size(n: int, m: int, exclude_single_pairs: bool = True) -> int:
    """Number of valid partial injective mappings between domains of size n, m.

    Counts all partial injections (including the empty mapping) and, by
    default, removes the n*m mappings of size 1, which the search never
    produces.  ``exclude_single_pairs=False`` exposes the raw count for
    transparency; exhaustive enumeration (see tests) confirms the subtracted
    variant is the one that counts valid mappings.
    """
    if n < 1 or m < 1:
        raise ValueError("domain sizes must be at least 1")
    if n > m:
        n, m = m, n
    total = sum(math.comb(n, i) * math.perm(m, i) for i in range(n + 1))
    if exclude_single_pairs:
        total -= n * m
    return total
