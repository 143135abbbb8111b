"""Immutable in-memory indexes over an academic-graph snapshot.

The snapshot is a UTF-8 JSON-lines file, one paper object per line. Loading
builds the forward tables plus an inverted citation index; everything is
frozen after construction so indexes can be shared across threads freely.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


class CorpusError(Exception):
    """Raised for unreadable files, malformed records, or bad lookups."""


@dataclass(frozen=True)
class Paper:
    paper_id: str
    title: str
    abstract: str
    year: int
    pub_day: int
    author_ids: tuple[str, ...]
    reference_ids: tuple[str, ...]
    embedding: np.ndarray | None = None

    def __post_init__(self):
        if not self.author_ids:
            raise CorpusError(f"paper {self.paper_id}: empty author list")
        if len(set(self.author_ids)) != len(self.author_ids):
            raise CorpusError(f"paper {self.paper_id}: duplicate authors")
        if self.paper_id in self.reference_ids:
            raise CorpusError(f"paper {self.paper_id}: references itself")


@dataclass(frozen=True)
class Author:
    author_id: str
    display_name: str
    paper_ids: tuple[str, ...]
    citation_count: int
    h_index: int | None = None


@dataclass(frozen=True)
class CorpusIndex:
    papers_by_id: dict[str, Paper]
    authors_by_id: dict[str, Author]
    author_to_papers: dict[str, tuple[str, ...]]
    citing_index: dict[str, frozenset[str]]
    recency_order: tuple[str, ...]
    embedding_dim: int | None
    dangling_ref_count: int
    # Token/idf tables shared by every model trained on this corpus; built
    # once at load so per-event retrains stay cheap.
    text_features: "object | None" = field(default=None, compare=False, repr=False)

    def paper(self, paper_id: str) -> Paper:
        try:
            return self.papers_by_id[paper_id]
        except KeyError:
            raise CorpusError(f"unknown paper id: {paper_id}") from None

    def author(self, author_id: str) -> Author:
        try:
            return self.authors_by_id[author_id]
        except KeyError:
            raise CorpusError(f"unknown author id: {author_id}") from None

    def author_publication_count(self, author_id: str) -> int:
        return len(self.author_to_papers.get(author_id, ()))

    def __len__(self) -> int:
        return len(self.papers_by_id)


_REQUIRED_KEYS = ("paper_id", "title", "abstract", "year", "pub_day",
                  "author_ids", "reference_ids")


def _parse_record(obj: dict, line_no: int) -> tuple[Paper, list[dict]]:
    for key in _REQUIRED_KEYS:
        if key not in obj:
            raise CorpusError(f"line {line_no}: missing key {key!r}")
    embedding = None
    if obj.get("embedding") is not None:
        embedding = np.asarray(obj["embedding"], dtype=np.float64)
        if embedding.ndim != 1:
            raise CorpusError(f"line {line_no}: embedding must be a flat array")
    author_meta = obj.get("authors") or []
    try:
        paper = Paper(
            paper_id=str(obj["paper_id"]),
            title=str(obj["title"]),
            abstract=str(obj["abstract"]),
            year=int(obj["year"]),
            pub_day=int(obj["pub_day"]),
            author_ids=tuple(str(a) for a in obj["author_ids"]),
            reference_ids=tuple(str(r) for r in obj["reference_ids"]),
            embedding=embedding,
        )
    except (TypeError, ValueError) as exc:
        raise CorpusError(f"line {line_no}: {exc}") from exc
    return paper, author_meta


def load_corpus(path, build_text_features: bool = True) -> CorpusIndex:
    """Load a JSONL snapshot into a CorpusIndex.

    References to paper ids absent from the snapshot are dropped and tallied
    in dangling_ref_count. The result does not depend on record order.
    """
    papers: dict[str, Paper] = {}
    author_names: dict[str, str] = {}
    author_hindex: dict[str, int] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CorpusError(f"line {line_no}: invalid JSON ({exc})") from exc
                if not isinstance(obj, dict):
                    raise CorpusError(f"line {line_no}: record is not an object")
                paper, author_meta = _parse_record(obj, line_no)
                if paper.paper_id in papers:
                    raise CorpusError(f"line {line_no}: duplicate paper id {paper.paper_id}")
                papers[paper.paper_id] = paper
                for meta in author_meta:
                    aid = str(meta["author_id"])
                    if "display_name" in meta:
                        author_names[aid] = str(meta["display_name"])
                    if meta.get("h_index") is not None:
                        author_hindex[aid] = int(meta["h_index"])
    except OSError as exc:
        raise CorpusError(f"cannot read corpus file {path}: {exc}") from exc

    embedding_dim = None
    for p in papers.values():
        if p.embedding is not None:
            if embedding_dim is None:
                embedding_dim = p.embedding.shape[0]
            elif p.embedding.shape[0] != embedding_dim:
                raise CorpusError(
                    f"paper {p.paper_id}: embedding dim {p.embedding.shape[0]} "
                    f"!= corpus dim {embedding_dim}")

    # Drop dangling references, then invert what remains.
    dangling = 0
    cleaned: dict[str, Paper] = {}
    for pid in sorted(papers):
        p = papers[pid]
        kept = tuple(r for r in p.reference_ids if r in papers)
        dangling += len(p.reference_ids) - len(kept)
        if len(kept) != len(p.reference_ids):
            p = Paper(p.paper_id, p.title, p.abstract, p.year, p.pub_day,
                      p.author_ids, kept, p.embedding)
        cleaned[pid] = p

    citing: dict[str, set[str]] = {pid: set() for pid in cleaned}
    for p in cleaned.values():
        for ref in p.reference_ids:
            citing[ref].add(p.paper_id)

    author_to_papers: dict[str, list[str]] = {}
    for pid in sorted(cleaned):
        for aid in cleaned[pid].author_ids:
            author_to_papers.setdefault(aid, []).append(pid)

    authors: dict[str, Author] = {}
    for aid in sorted(author_to_papers):
        pids = tuple(author_to_papers[aid])
        citation_count = sum(len(citing[pid]) for pid in pids)
        authors[aid] = Author(
            author_id=aid,
            display_name=author_names.get(aid, aid),
            paper_ids=pids,
            citation_count=citation_count,
            h_index=author_hindex.get(aid),
        )

    recency = tuple(sorted(cleaned, key=lambda pid: (-cleaned[pid].pub_day, pid)))

    index = CorpusIndex(
        papers_by_id=cleaned,
        authors_by_id=authors,
        author_to_papers={a: tuple(ps) for a, ps in author_to_papers.items()},
        citing_index={pid: frozenset(s) for pid, s in citing.items()},
        recency_order=recency,
        embedding_dim=embedding_dim,
        dangling_ref_count=dangling,
    )
    if build_text_features:
        from .scorer import TextFeatures
        object.__setattr__(index, "text_features", TextFeatures.from_corpus(index))
    return index


def citing_papers(index: CorpusIndex, paper_id: str) -> frozenset[str]:
    """Papers whose reference list contains paper_id."""
    index.paper(paper_id)
    return index.citing_index.get(paper_id, frozenset())


def author_citation_count(index: CorpusIndex, citing_author_id: str,
                          cited_paper_id: str) -> int:
    """How many of an author's papers cite the given paper, self-citations excluded.

    A citation q -> p is a self-citation w.r.t. author a iff a authored both
    q and p; since q here is always one of a's papers, the exclusion reduces
    to: a must not be an author of the cited paper.
    """
    index.author(citing_author_id)
    cited = index.paper(cited_paper_id)
    if citing_author_id in cited.author_ids:
        return 0
    count = 0
    for pid in index.author_to_papers.get(citing_author_id, ()):
        if cited_paper_id in index.papers_by_id[pid].reference_ids:
            count += 1
    return count
