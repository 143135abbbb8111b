"""Interpretable relevance evidence for recommended authors and papers.

Evidence ties a candidate author to committee members through shared papers
(coauthored-with) or citations of the candidate's work (cited-by, always
excluding self-citations). The unique-evidence ratio -- distinct evidence
papers across all tags divided by the candidate's publication count -- is
the presentation sort key within a batch.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .corpus import CorpusIndex, author_citation_count
from .scorer import FeedbackSet


class TagKind(enum.Enum):
    COAUTHORED_WITH = "coauthored_with"
    CITED_BY = "cited_by"


@dataclass(frozen=True)
class ExplanationTag:
    kind: TagKind
    committee_author_id: str
    evidence_paper_ids: frozenset[str]

    @property
    def count(self) -> int:
        return len(self.evidence_paper_ids)


@dataclass
class AuthorCard:
    author_id: str
    display_name: str
    strategy_origin: str
    vote_count: int
    tags: list[ExplanationTag]
    relevant_paper_count: int
    total_paper_count: int
    h_index: int | None
    citation_count: int
    histogram: dict[int, tuple[int, int]]  # year -> (total, predicted relevant)
    relevance_ratio: float
    ranked_publications: dict  # judged stack first, then unjudged by score
    score_snapshot: dict[str, float] = field(default_factory=dict)


def coauthor_tags(candidate: str, committee, index: CorpusIndex) -> list[ExplanationTag]:
    """One tag per committee member sharing at least one paper with the candidate."""
    cand_pubs = set(index.author_to_papers.get(candidate, ()))
    tags = []
    for member in sorted(committee):
        if member == candidate:
            continue
        shared = cand_pubs & set(index.author_to_papers.get(member, ()))
        if shared:
            tags.append(ExplanationTag(TagKind.COAUTHORED_WITH, member,
                                       frozenset(shared)))
    return tags


def citedby_tags(candidate: str, committee, index: CorpusIndex) -> list[ExplanationTag]:
    """One tag per committee member citing the candidate, self-citations excluded.

    Evidence is candidate-side: the candidate's papers the member has cited.
    """
    tags = []
    for member in sorted(committee):
        if member == candidate:
            continue
        evidence = {pid for pid in index.author_to_papers.get(candidate, ())
                    if author_citation_count(index, member, pid) > 0}
        if evidence:
            tags.append(ExplanationTag(TagKind.CITED_BY, member, frozenset(evidence)))
    return tags


def paper_citer_labels(paper_id: str, committee, index: CorpusIndex,
                       limit: int = 3) -> list[tuple[str, int]]:
    """Committee members citing this paper most often (self-citations excluded)."""
    counts = []
    for member in committee:
        n = author_citation_count(index, member, paper_id)
        if n > 0:
            counts.append((member, n))
    counts.sort(key=lambda e: (-e[1], -index.author_publication_count(e[0]), e[0]))
    return counts[:limit]


def year_histogram(author_id: str, index: CorpusIndex,
                   paper_scores: dict[str, float],
                   selected_tag: ExplanationTag | None = None) -> dict:
    """Per-year publication counts with relevant (score > 0) and tag overlays."""
    hist: dict[int, dict[str, int]] = {}
    for pid in index.author_to_papers.get(author_id, ()):
        year = index.papers_by_id[pid].year
        bucket = hist.setdefault(year, {"total": 0, "relevant": 0, "tag_overlay": 0})
        bucket["total"] += 1
        if paper_scores.get(pid, 0.0) > 0:
            bucket["relevant"] += 1
        if selected_tag is not None and pid in selected_tag.evidence_paper_ids:
            bucket["tag_overlay"] += 1
    return hist


def rank_publications(author_id: str, index: CorpusIndex,
                      paper_scores: dict[str, float], feedback: FeedbackSet,
                      default_visible: int = 5) -> dict:
    """Judged papers as a recency stack on top, then unjudged by score."""
    pubs = index.author_to_papers.get(author_id, ())
    judged = [pid for pid in pubs if feedback.label_of(pid) is not None
              and pid in feedback.judged_ids()]
    judged.sort(key=lambda pid: (-(feedback.timestamp_of(pid) or 0.0), pid))
    unjudged = [pid for pid in pubs if pid not in set(judged)]
    unjudged.sort(key=lambda pid: (-paper_scores.get(pid, 0.0), pid))
    def entry(pid):
        paper = index.papers_by_id[pid]
        return {"paper_id": pid, "title": paper.title, "year": paper.year,
                "author_ids": list(paper.author_ids),
                "score": paper_scores.get(pid)}

    stack = [{**entry(pid), "label": feedback.label_of(pid)} for pid in judged]
    rest = [entry(pid) for pid in unjudged]
    return {"judged_stack": stack, "unjudged": rest,
            "default_visible": default_visible}


def unique_evidence_ratio(tags, total_paper_count: int) -> float:
    """Distinct evidence papers across tags over publication count (0 if none)."""
    if total_paper_count <= 0 or not tags:
        return 0.0
    union: set[str] = set()
    for tag in tags:
        union |= tag.evidence_paper_ids
    return len(union) / total_paper_count


def relevance_ratio(card: AuthorCard) -> float:
    return unique_evidence_ratio(card.tags, card.total_paper_count)


def build_card(author_id: str, strategy_origin: str, vote_count: int,
               committee, index: CorpusIndex, paper_scores: dict[str, float],
               feedback: FeedbackSet, default_visible: int = 5) -> AuthorCard:
    """Assemble a card with all available explanations and a score snapshot."""
    author = index.author(author_id)
    tags = coauthor_tags(author_id, committee, index) \
        + citedby_tags(author_id, committee, index)
    pubs = index.author_to_papers.get(author_id, ())
    snapshot = {pid: paper_scores.get(pid, 0.0) for pid in pubs}
    relevant = sum(1 for pid in pubs if snapshot.get(pid, 0.0) > 0)
    hist = {year: (b["total"], b["relevant"])
            for year, b in year_histogram(author_id, index, snapshot).items()}
    return AuthorCard(
        author_id=author_id,
        display_name=author.display_name,
        strategy_origin=strategy_origin,
        vote_count=vote_count,
        tags=tags,
        relevant_paper_count=relevant,
        total_paper_count=len(pubs),
        h_index=author.h_index,
        citation_count=author.citation_count,
        histogram=hist,
        relevance_ratio=unique_evidence_ratio(tags, len(pubs)),
        ranked_publications=rank_publications(author_id, index, snapshot,
                                              feedback, default_visible),
        score_snapshot=snapshot,
    )


def presentation_order(cards: list[AuthorCard], index: CorpusIndex) -> list[AuthorCard]:
    """Ratio descending, then the deterministic author tie-break."""
    return sorted(cards, key=lambda c: (
        -c.relevance_ratio, -index.author_publication_count(c.author_id),
        c.author_id))
