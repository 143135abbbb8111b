import json
import zlib
from pathlib import Path

import pytest

from authorscout.corpus import load_corpus

REPO_ROOT = Path(__file__).resolve().parent.parent
TOY_GRAPH_A = REPO_ROOT / "data" / "toy_graph_a.jsonl"


def frozen_score(paper_id: str) -> float:
    """Deterministic pseudo-score in (-1, 1), independent of any trained model."""
    return ((zlib.crc32(paper_id.encode()) % 2001) - 1000) / 1000.0


class FrozenToyModel:
    """Stand-in relevance model with hash-based scores (no training)."""

    def __init__(self, overrides=None):
        self.overrides = overrides or {}

    def score(self, paper) -> float:
        if paper.paper_id in self.overrides:
            return self.overrides[paper.paper_id]
        return frozen_score(paper.paper_id)


@pytest.fixture(scope="session")
def toy_index():
    return load_corpus(TOY_GRAPH_A)


@pytest.fixture
def toy_model():
    return FrozenToyModel()


def write_corpus(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    return path


def make_record(paper_id, author_ids, reference_ids=(), title="t", abstract="a",
                year=2020, pub_day=18500, **extra):
    rec = {"paper_id": paper_id, "title": title, "abstract": abstract,
           "year": year, "pub_day": pub_day, "author_ids": list(author_ids),
           "reference_ids": list(reference_ids)}
    rec.update(extra)
    return rec
