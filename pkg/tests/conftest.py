import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from relmap.model import RelationSet, normalize_entity
from relmap.similarity import HashedNgramEmbedder, Stoplist
from relmap.sources import LocalKBSource, Snapshot

DATA_DIR = Path(__file__).parent.parent / "src" / "relmap" / "data"


@pytest.fixture(scope="session")
def provider():
    return HashedNgramEmbedder()


@pytest.fixture(scope="session")
def stoplist():
    return Stoplist.default()


@pytest.fixture
def data_dir():
    return DATA_DIR


class TableProvider:
    """Embedding provider backed by an explicit text -> vector table."""

    backend = "table"

    def __init__(self, table: dict[str, np.ndarray], provider_id="table"):
        self.id = provider_id
        self._table = {t: np.asarray(v, dtype=float) / np.linalg.norm(v)
                       for t, v in table.items()}
        self.dimension = len(next(iter(self._table.values())))

    def embed(self, text):
        return self._table[text]


@pytest.fixture
def table_provider_cls():
    return TableProvider


def make_entities(*names):
    return [normalize_entity(n) for n in names]


def snapshot_from(table: dict[tuple[str, str, str], list[str]]) -> Snapshot:
    snap = Snapshot(created_at="2026-01-01T00:00:00+00:00")
    for (source, head, tail), phrases in table.items():
        snap.put(source, head, tail, phrases)
    return snap


def kb_source(source_id: str, table: dict[tuple[str, str], list[str]]):
    return LocalKBSource(source_id, table)
