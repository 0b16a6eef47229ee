"""Relation acquisition: pluggable sources plus the reproducibility snapshot.

Live sources (HTTP autocomplete, generative LM, graph APIs) are only
consulted on a cache miss with live mode enabled; every query result,
including an empty one, lands in the snapshot so replays never touch the
network.
"""

from __future__ import annotations

import json
import logging
import re
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Optional

from .model import Entity, RelationPhrase, RelationSet, normalize_phrase, normalize_text

log = logging.getLogger(__name__)

SNAPSHOT_FORMAT = "relmap-snapshot"
SNAPSHOT_VERSION = 1

DEFAULT_SOURCE_CAP = 50


class SourceKind(Enum):
    LOCAL_KB = "local_kb"
    TRIPLE_LOOKUP = "triple_lookup"
    CONCEPT_GRAPH_API = "concept_graph_api"
    AUTOCOMPLETE = "autocomplete"
    GENERATIVE_LM = "generative_lm"


class ConfigurationError(RuntimeError):
    """A source is misconfigured (missing store file, bad template, ...)."""


class SourceUnavailableError(RuntimeError):
    """A live source could not be reached; the source is skipped."""


class RelationSource:
    """Base class for relation sources.

    Subclasses implement ``fetch`` returning raw phrase strings for one
    directed pair.  ``fetch`` is only called in live mode on a snapshot
    miss.
    """

    id: str
    kind: SourceKind

    def __init__(self, source_id: str, kind: SourceKind,
                 config: Optional[dict] = None):
        self.id = source_id
        self.kind = kind
        self.config = dict(config or {})

    def fetch(self, head: Entity, tail: Entity) -> list[str]:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.id!r})"


class SnapshotOnlySource(RelationSource):
    """Placeholder for a source that only exists as snapshot entries."""

    def __init__(self, source_id: str):
        super().__init__(source_id, SourceKind.LOCAL_KB)

    def fetch(self, head, tail):
        raise SourceUnavailableError(
            f"source {self.id!r} has no live backend; snapshot entries only")


class LocalKBSource(RelationSource):
    """In-memory (head, tail) -> phrases table; handy for tests and demos."""

    def __init__(self, source_id: str,
                 table: dict[tuple[str, str], list[str]]):
        super().__init__(source_id, SourceKind.LOCAL_KB)
        self._table = {(normalize_text(h), normalize_text(t)): list(v)
                       for (h, t), v in table.items()}

    def fetch(self, head, tail):
        out: list[str] = []
        for hs in head.surface_forms:
            for ts in tail.surface_forms:
                out.extend(self._table.get((hs, ts), []))
        return out


class TripleStoreSource(RelationSource):
    """Indexed (subject, predicate, object) file, one tab-separated triple
    per line with an optional trailing score column.

    A sidecar JSON index keyed by subject/object pairs is written on first
    load and reused while the store file is unchanged.  The same mechanism
    backs open-IE style dumps, salient-property KBs, and concept-graph edge
    dumps.
    """

    def __init__(self, source_id: str, path: str | Path,
                 kind: SourceKind = SourceKind.TRIPLE_LOOKUP):
        super().__init__(source_id, kind, {"path": str(path)})
        self._path = Path(path)
        if not self._path.exists():
            raise ConfigurationError(f"triple store file not found: {self._path}")
        self._triples = self._load()
        self._by_pair: dict[tuple[str, str], list[str]] = {}
        self._by_subject_pred: dict[tuple[str, str], list[str]] = {}
        self._by_object_pred: dict[tuple[str, str], list[str]] = {}
        for subj, pred, obj in self._triples:
            self._by_pair.setdefault((subj, obj), []).append(pred)
            self._by_subject_pred.setdefault((subj, pred), []).append(obj)
            self._by_object_pred.setdefault((obj, pred), []).append(subj)

    def _index_path(self) -> Path:
        return self._path.with_name(self._path.name + ".idx.json")

    def _load(self) -> list[tuple[str, str, str]]:
        idx = self._index_path()
        mtime = self._path.stat().st_mtime
        if idx.exists():
            try:
                cached = json.loads(idx.read_text(encoding="utf-8"))
                if cached.get("mtime") == mtime:
                    return [tuple(t) for t in cached["triples"]]
            except (json.JSONDecodeError, KeyError, TypeError):
                log.warning("corrupt sidecar index %s, rebuilding", idx)
        triples: list[tuple[str, str, str]] = []
        try:
            with self._path.open(encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, 1):
                    line = line.rstrip("\n")
                    if not line:
                        continue
                    parts = line.split("\t")
                    if len(parts) < 3:
                        raise ConfigurationError(
                            f"{self._path}:{lineno}: expected at least 3 "
                            f"tab-separated fields")
                    subj, pred, obj = (normalize_text(parts[0]),
                                       normalize_phrase(parts[1]),
                                       normalize_text(parts[2]))
                    triples.append((subj, pred, obj))
        except OSError as exc:
            raise ConfigurationError(f"cannot read triple store: {exc}") from exc
        try:
            idx.write_text(json.dumps({"mtime": mtime, "triples": triples}),
                           encoding="utf-8")
        except OSError:
            log.warning("could not write sidecar index %s", idx)
        return triples

    def fetch(self, head, tail):
        out: list[str] = []
        for hs in head.surface_forms:
            for ts in tail.surface_forms:
                out.extend(self._by_pair.get((hs, ts), []))
        return out

    def objects_for(self, subject: Entity, predicate: str) -> list[str]:
        pred = normalize_phrase(predicate)
        out: list[str] = []
        for s in subject.surface_forms:
            out.extend(self._by_subject_pred.get((s, pred), []))
        return out

    def subjects_for(self, obj: Entity, predicate: str) -> list[str]:
        pred = normalize_phrase(predicate)
        out: list[str] = []
        for o in obj.surface_forms:
            out.extend(self._by_object_pred.get((o, pred), []))
        return out


AUTOCOMPLETE_QUESTIONS = (
    "why do", "why is", "why does", "why does it", "why did",
    "how do", "how is", "how does", "how does it", "how did",
)
AUTOCOMPLETE_PREFIXES = ("", "a", "an", "the")


class AutocompleteSource(RelationSource):
    """Harvest relations from search-engine query completions.

    Issues "<question> [prefix] <head form>" queries and captures the text
    between the head and tail surface forms in each returned completion.
    ``client`` is a callable query -> list of suggestion strings; an HTTP
    GET client returning a JSON array can be built with ``http_client``.
    """

    def __init__(self, source_id: str,
                 client: Callable[[str], list[str]],
                 questions: tuple[str, ...] = AUTOCOMPLETE_QUESTIONS,
                 prefixes: tuple[str, ...] = AUTOCOMPLETE_PREFIXES,
                 max_retries: int = 3):
        super().__init__(source_id, SourceKind.AUTOCOMPLETE)
        self._client = client
        self.questions = questions
        self.prefixes = prefixes
        self._max_retries = max_retries

    @staticmethod
    def http_client(url_template: str, session=None,
                    timeout: float = 10.0) -> Callable[[str], list[str]]:
        """GET client for endpoints of the form ``.../complete?q={query}``."""
        import requests

        sess = session or requests.Session()

        def query(q: str) -> list[str]:
            resp = sess.get(url_template.format(query=q), timeout=timeout)
            if resp.status_code == 429:
                raise SourceUnavailableError("autocomplete endpoint throttling")
            resp.raise_for_status()
            body = resp.json()
            if not isinstance(body, list):
                raise ValueError("autocomplete response is not a JSON array")
            return [str(s) for s in body]

        return query

    def complete(self, query: str) -> list[str]:
        delay = 0.5
        for attempt in range(self._max_retries):
            try:
                return self._client(query)
            except SourceUnavailableError:
                if attempt + 1 == self._max_retries:
                    raise
                time.sleep(delay)
                delay *= 2
        return []

    def fetch(self, head, tail):
        phrases: list[str] = []
        seen: set[str] = set()
        for question in self.questions:
            for prefix in self.prefixes:
                for hs in head.surface_forms:
                    query = " ".join(p for p in (question, prefix, hs) if p)
                    try:
                        completions = self.complete(query)
                    except SourceUnavailableError:
                        log.warning("autocomplete throttled, skipping %r", query)
                        continue
                    for completion in completions:
                        for ts in tail.surface_forms:
                            phrase = self._match(question, prefix, hs, ts,
                                                 completion)
                            if phrase and phrase not in seen:
                                seen.add(phrase)
                                phrases.append(phrase)
        return phrases

    @staticmethod
    def _match(question: str, prefix: str, head_form: str, tail_form: str,
               completion: str) -> Optional[str]:
        pattern = (
            rf"^{re.escape(question)}\s+"
            + (rf"{re.escape(prefix)}\s+" if prefix else "")
            + rf"{re.escape(head_form)}\s+(.+?)\s+{re.escape(tail_form)}\b"
        )
        m = re.search(pattern, normalize_text(completion))
        if not m:
            return None
        return normalize_phrase(m.group(1)) or None


DEFAULT_PROMPT_PATH = Path(__file__).parent / "data" / "relation_prompt.txt"

_ARTICLES = ("a ", "an ", "the ")


class GenerativeSource(RelationSource):
    """Relations from a text-completion endpoint prompted with few-shot
    relation questions.

    Answer lines of the form "A: <sentence>" are kept when the sentence
    starts with a surface form of one entity and ends with a surface form
    of the other; the middle text is the relation.  Only sentences in
    head -> tail order are returned for the queried direction.
    """

    def __init__(self, source_id: str,
                 complete: Callable[[str], str],
                 prompt_template: str | Path = DEFAULT_PROMPT_PATH):
        super().__init__(source_id, SourceKind.GENERATIVE_LM,
                         {"prompt_template": str(prompt_template)})
        self._complete = complete
        path = Path(prompt_template)
        if not path.exists():
            raise ConfigurationError(f"prompt template not found: {path}")
        self._template = path.read_text(encoding="utf-8")
        if "{head}" not in self._template or "{tail}" not in self._template:
            raise ConfigurationError(
                "prompt template must contain {head} and {tail} slots")

    def fetch(self, head, tail):
        prompt = self._template.format(head=head.name, tail=tail.name)
        try:
            reply = self._complete(prompt)
        except Exception as exc:
            raise SourceUnavailableError(str(exc)) from exc
        phrases: list[str] = []
        for line in reply.splitlines():
            line = line.strip()
            if not line.lower().startswith("a:"):
                continue
            sentence = normalize_text(line[2:]).rstrip(".")
            parsed = self._parse_sentence(sentence, head, tail)
            if parsed is not None:
                phrases.append(parsed)
        return phrases

    @staticmethod
    def _parse_sentence(sentence: str, head: Entity,
                        tail: Entity) -> Optional[str]:
        body = sentence
        for article in _ARTICLES:
            if body.startswith(article):
                body = body[len(article):]
                break
        for hs in sorted(head.surface_forms, key=len, reverse=True):
            if not body.startswith(hs + " "):
                continue
            for ts in sorted(tail.surface_forms, key=len, reverse=True):
                if body.endswith(" " + ts):
                    middle = body[len(hs):len(body) - len(ts)].strip()
                    middle = normalize_phrase(middle)
                    if middle:
                        return middle
        return None


class Snapshot:
    """Persisted dump of extracted relations keyed by (source, head, tail).

    Misses queried live are recorded as empty lists (negative caching), so
    a saved snapshot replays with the network disabled.  Entries are
    append-only within a run.
    """

    def __init__(self, created_at: Optional[str] = None):
        self.created_at = created_at or datetime.now(timezone.utc).isoformat()
        self.version = SNAPSHOT_VERSION
        self.entries: dict[tuple[str, str, str], list[str]] = {}

    @classmethod
    def load(cls, path: str | Path) -> "Snapshot":
        path = Path(path)
        if not path.exists():
            raise ConfigurationError(f"snapshot file not found: {path}")
        snap = cls()
        with path.open(encoding="utf-8") as fh:
            header_line = fh.readline().strip()
            try:
                header = json.loads(header_line)
            except json.JSONDecodeError as exc:
                raise ConfigurationError(
                    f"{path}: missing snapshot header line") from exc
            if header.get("format") != SNAPSHOT_FORMAT:
                raise ConfigurationError(f"{path}: not a relation snapshot")
            snap.version = header.get("version", SNAPSHOT_VERSION)
            snap.created_at = header.get("created_at", snap.created_at)
            for lineno, line in enumerate(fh, 2):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    key = (rec["source"], rec["head"], rec["tail"])
                    phrases = [str(p) for p in rec["relations"]]
                except (json.JSONDecodeError, KeyError, TypeError):
                    log.warning("%s:%d: malformed snapshot record skipped",
                                path, lineno)
                    continue
                snap.entries[key] = phrases
        return snap

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8") as fh:
            fh.write(json.dumps({"format": SNAPSHOT_FORMAT,
                                 "version": self.version,
                                 "created_at": self.created_at}) + "\n")
            for (source, head, tail) in sorted(self.entries):
                fh.write(json.dumps({"source": source, "head": head,
                                     "tail": tail,
                                     "relations": self.entries[(source, head, tail)]})
                         + "\n")

    def get(self, source_id: str, head: str, tail: str) -> Optional[list[str]]:
        return self.entries.get((source_id, head, tail))

    def put(self, source_id: str, head: str, tail: str,
            phrases: list[str]) -> None:
        self.entries[(source_id, head, tail)] = list(phrases)

    def source_ids(self) -> list[str]:
        return sorted({source for source, _, _ in self.entries})

    def has_entity(self, name: str) -> bool:
        return any(name in (h, t) for _, h, t in self.entries)

    def __len__(self):
        return len(self.entries)


def extract_relations(head: Entity, tail: Entity,
                      sources: Iterable[RelationSource],
                      snapshot: Snapshot,
                      live: bool = False,
                      per_source_cap: int = DEFAULT_SOURCE_CAP) -> RelationSet:
    """Union of per-source relations for one directed pair, snapshot-cached.

    Identical snapshot implies an identical, canonically ordered result.
    Live failures are warnings, never fatal; the failing source is skipped
    for the pair and nothing is cached for it.
    """
    if head == tail:
        raise ValueError("head and tail must differ")
    collected: list[RelationPhrase] = []
    for source in sources:
        cached = snapshot.get(source.id, head.name, tail.name)
        if cached is None:
            if not live:
                continue
            try:
                raw = source.fetch(head, tail)
            except ConfigurationError:
                raise
            except Exception as exc:  # noqa: BLE001 - live sources must never be fatal
                log.warning("source %s unavailable for (%s, %s): %s",
                            source.id, head.name, tail.name, exc)
                continue
            phrases: list[str] = []
            for p in raw:
                norm = normalize_phrase(p)
                if norm and norm not in phrases:
                    phrases.append(norm)
                if len(phrases) >= per_source_cap:
                    break
            snapshot.put(source.id, head.name, tail.name, phrases)
            cached = phrases
        collected.extend(RelationPhrase(normalize_phrase(p), source=source.id)
                         for p in cached if normalize_phrase(p))
    return RelationSet.build(head, tail, collected)


class RelationIndex:
    """All directed intra-domain relation sets for one problem instance."""

    def __init__(self):
        self._sets: dict[tuple[str, str], RelationSet] = {}

    @classmethod
    def build(cls, base: list[Entity], target: list[Entity],
              sources: Iterable[RelationSource], snapshot: Snapshot,
              live: bool = False,
              per_source_cap: int = DEFAULT_SOURCE_CAP) -> "RelationIndex":
        index = cls()
        sources = list(sources)
        for domain in (base, target):
            for h in domain:
                for t in domain:
                    if h == t:
                        continue
                    index._sets[(h.name, t.name)] = extract_relations(
                        h, t, sources, snapshot, live=live,
                        per_source_cap=per_source_cap)
        return index

    def get(self, head: Entity, tail: Entity) -> RelationSet:
        rs = self._sets.get((head.name, tail.name))
        if rs is None:
            return RelationSet(head=head, tail=tail)
        return rs

    def put(self, relation_set: RelationSet) -> None:
        self._sets[(relation_set.head.name, relation_set.tail.name)] = relation_set

    def __len__(self):
        return len(self._sets)
