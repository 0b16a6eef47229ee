"""Dataset loading and the evaluation metrics: perfect-mapping accuracy,
per-entity accuracy, top-k accuracy, and guess levels."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import yaml

from .model import Entity, Mapping, normalize_entity, normalize_text, solution_space_size
from .search import SearchConfig, solve
from .similarity import Stoplist
from .sources import RelationIndex, RelationSource, Snapshot, SnapshotOnlySource

log = logging.getLogger(__name__)

CATEGORIES = ("near", "far", "extended", "custom")


@dataclass(frozen=True)
class AnalogyProblem:
    id: str
    base: tuple[Entity, ...]
    target: tuple[Entity, ...]
    gold: tuple[tuple[str, str], ...]  # (base name, target name) pairs
    category: str = "custom"

    def __post_init__(self):
        base_names = {e.name for e in self.base}
        target_names = {e.name for e in self.target}
        gold_bases = [b for b, _ in self.gold]
        gold_targets = [t for _, t in self.gold]
        if len(set(gold_bases)) != len(gold_bases):
            raise ValueError(f"{self.id}: gold maps a base entity twice")
        if len(set(gold_targets)) != len(gold_targets):
            raise ValueError(f"{self.id}: gold is not injective")
        if not set(gold_bases) <= base_names or not set(gold_targets) <= target_names:
            raise ValueError(f"{self.id}: gold references unknown entities")
        if self.category not in CATEGORIES:
            raise ValueError(f"{self.id}: unknown category {self.category!r}")

    @property
    def gold_set(self) -> frozenset[tuple[str, str]]:
        return frozenset(self.gold)


def _problem_from_record(rec: dict) -> AnalogyProblem:
    if "quad" in rec:
        # classic A:B::C:D shorthand
        left, right = rec["quad"].split("::")
        base = [normalize_entity(x) for x in left.split(":")]
        target = [normalize_entity(x) for x in right.split(":")]
        if len(base) != 2 or len(target) != 2:
            raise ValueError(f"bad quad: {rec['quad']!r}")
        gold = tuple((b.name, t.name) for b, t in zip(base, target))
    else:
        base = [normalize_entity(x) for x in rec["base"]]
        target = [normalize_entity(x) for x in rec["target"]]
        gold = tuple(sorted((normalize_text(b), normalize_text(t))
                            for b, t in rec.get("gold", {}).items()))
    return AnalogyProblem(id=str(rec["id"]), base=tuple(base),
                          target=tuple(target), gold=gold,
                          category=rec.get("category", "custom").lower())


def load_problems(path: str | Path) -> list[AnalogyProblem]:
    """Problem files are JSON or YAML: a list of records (or a mapping with
    a ``problems`` list), each with id/base/target/gold/category or a
    ``quad`` shorthand."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix in (".yaml", ".yml"):
        data = yaml.safe_load(text)
    else:
        data = json.loads(text)
    if isinstance(data, dict):
        data = data["problems"]
    return [_problem_from_record(rec) for rec in data]


@dataclass
class ProblemResult:
    problem_id: str
    covered: bool
    predicted: Optional[Mapping] = None
    gold_rank: Optional[int] = None  # 1-based rank among beam outputs
    correct_entities: int = 0
    gold_size: int = 0
    guess_level_bijective: float = 0.0
    guess_level_relaxed: float = 0.0

    @property
    def perfect(self) -> bool:
        return self.gold_rank == 1


@dataclass
class EvalReport:
    results: list[ProblemResult] = field(default_factory=list)

    @property
    def evaluated(self) -> list[ProblemResult]:
        return [r for r in self.results if r.covered]

    @property
    def uncovered(self) -> list[str]:
        return [r.problem_id for r in self.results if not r.covered]

    def _ratio(self, num: float, den: float) -> float:
        return num / den if den else 0.0

    @property
    def perfect_accuracy(self) -> float:
        rs = self.evaluated
        return self._ratio(sum(r.perfect for r in rs), len(rs))

    def top_k_accuracy(self, k: int) -> float:
        rs = self.evaluated
        return self._ratio(
            sum(r.gold_rank is not None and r.gold_rank <= k for r in rs),
            len(rs))

    @property
    def per_entity_accuracy(self) -> float:
        rs = self.evaluated
        return self._ratio(sum(r.correct_entities for r in rs),
                           sum(r.gold_size for r in rs))

    @property
    def mean_guess_level_bijective(self) -> float:
        rs = self.evaluated
        return self._ratio(sum(r.guess_level_bijective for r in rs), len(rs))

    @property
    def mean_guess_level_relaxed(self) -> float:
        rs = self.evaluated
        return self._ratio(sum(r.guess_level_relaxed for r in rs), len(rs))

    def to_dict(self) -> dict:
        return {
            "problems": [
                {"id": r.problem_id,
                 "covered": r.covered,
                 "perfect": r.perfect,
                 "gold_rank": r.gold_rank,
                 "correct_entities": r.correct_entities,
                 "gold_size": r.gold_size,
                 "predicted": (sorted(list(p) for p in r.predicted.assignments)
                               if r.predicted else None)}
                for r in self.results],
            "aggregates": {
                "evaluated": len(self.evaluated),
                "uncovered": self.uncovered,
                "perfect_accuracy": self.perfect_accuracy,
                "per_entity_accuracy": self.per_entity_accuracy,
                "top_2_accuracy": self.top_k_accuracy(2),
                "top_3_accuracy": self.top_k_accuracy(3),
                "mean_guess_level_bijective": self.mean_guess_level_bijective,
                "mean_guess_level_relaxed": self.mean_guess_level_relaxed,
            },
        }

    def to_text(self) -> str:
        lines = [f"{'problem':<24}{'covered':<9}{'perfect':<9}"
                 f"{'rank':<6}{'entities':<10}"]
        for r in self.results:
            rank = str(r.gold_rank) if r.gold_rank else "-"
            lines.append(f"{r.problem_id:<24}{str(r.covered):<9}"
                         f"{str(r.perfect):<9}{rank:<6}"
                         f"{r.correct_entities}/{r.gold_size}")
        agg = self.to_dict()["aggregates"]
        lines.append("")
        lines.append(f"perfect accuracy:    {agg['perfect_accuracy']:.4f}")
        lines.append(f"per-entity accuracy: {agg['per_entity_accuracy']:.4f}")
        lines.append(f"top-2 accuracy:      {agg['top_2_accuracy']:.4f}")
        lines.append(f"top-3 accuracy:      {agg['top_3_accuracy']:.4f}")
        lines.append(f"mean guess level (bijective): "
                     f"{agg['mean_guess_level_bijective']:.4f}")
        lines.append(f"mean guess level (relaxed):   "
                     f"{agg['mean_guess_level_relaxed']:.4f}")
        return "\n".join(lines)


def guess_level(problem: AnalogyProblem, mode: str = "relaxed") -> float:
    """Probability a uniformly random valid mapping equals gold."""
    n, m = len(problem.base), len(problem.target)
    if mode.lower() == "bijective":
        return 1.0 / math.factorial(n)
    if mode.lower() == "relaxed":
        return 1.0 / solution_space_size(n, m)
    raise ValueError(f"unknown guess-level mode: {mode!r}")


def _covered(problem: AnalogyProblem, snapshot: Snapshot,
             source_ids: list[str]) -> bool:
    names = {e.name for e in problem.base} | {e.name for e in problem.target}
    return all(
        any(snapshot.get(s, h, t) is not None or snapshot.get(s, t, h) is not None
            for s in source_ids
            for t in names if t != h)
        for h in names)


def evaluate(problems: Iterable[AnalogyProblem], config: SearchConfig,
             snapshot: Snapshot, provider, stoplist: Optional[Stoplist],
             enabled_sources: Optional[list[str]] = None,
             sources: Optional[list[RelationSource]] = None,
             live: bool = False) -> EvalReport:
    """Run the mapping engine over a problem set and score the predictions.

    Offline by default: relations come from the snapshot only, and a
    problem whose entities have no snapshot entries at all is marked
    uncovered and excluded from the aggregates.  ``enabled_sources``
    restricts which source ids contribute relations (the ablation knob).
    """
    if sources is None:
        sources = [SnapshotOnlySource(sid) for sid in snapshot.source_ids()]
    if enabled_sources is not None:
        sources = [s for s in sources if s.id in enabled_sources]
    source_ids = [s.id for s in sources]

    report = EvalReport()
    for problem in problems:
        if not live and not _covered(problem, snapshot, source_ids):
            log.warning("problem %s not covered by snapshot; skipping",
                        problem.id)
            report.results.append(ProblemResult(problem_id=problem.id,
                                                covered=False))
            continue
        index = RelationIndex.build(list(problem.base), list(problem.target),
                                    sources, snapshot, live=live)
        ranked, _ = solve(list(problem.base), list(problem.target), index,
                          provider, stoplist, config)
        predicted = ranked[0]
        gold = problem.gold_set
        gold_rank = next((i for i, m in enumerate(ranked, 1)
                          if m.assignments == gold), None)
        report.results.append(ProblemResult(
            problem_id=problem.id, covered=True, predicted=predicted,
            gold_rank=gold_rank,
            correct_entities=len(predicted.assignments & gold),
            gold_size=len(gold),
            guess_level_bijective=guess_level(problem, "bijective"),
            guess_level_relaxed=guess_level(problem, "relaxed")))
    return report
