"""Author-sourcing strategies, voting primitives, and batch generation.

Four ranked author lists are maintained per folder:

  * library    -- authors of the saved/seed papers, by frequency
  * recent     -- authors voted by the top-scoring papers of the last 180 days
  * coauthor   -- authors voted by the committee's relevant publications
  * citation   -- authors voted by the references the committee cites most

Every ranking is deterministic: votes descending, then total publication
count descending, then author id ascending. Papers rank by score descending
then paper id ascending.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .scorer import FeedbackSet, scores_with_feedback_many

RELEVANT_POOL = 100


class Strategy(enum.Enum):
    LIBRARY_EXTRACTED = "library_extracted"
    RECENT_RELEVANT = "recent_relevant"
    COAUTHOR_EXPANSION = "coauthor_expansion"
    CITATION_EXPANSION = "citation_expansion"


STRATEGY_ORDER = (
    Strategy.LIBRARY_EXTRACTED,
    Strategy.RECENT_RELEVANT,
    Strategy.COAUTHOR_EXPANSION,
    Strategy.CITATION_EXPANSION,
)


@dataclass
class RankedAuthorList:
    strategy: Strategy
    entries: list[tuple[str, int]]  # (author_id, vote_count), rank order
    cursor: int = 0


@dataclass
class BatchState:
    lists: dict[Strategy, RankedAuthorList]
    served_author_ids: set[str] = field(default_factory=set)
    batch_counter: int = 0


def sort_sample(scored_items, n: int, tiebreak=None) -> list:
    """Sort by key descending (deterministic ties), return the first n items.

    scored_items: iterable of (item, key). tiebreak(item) orders equal keys;
    by default the item itself must be orderable.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    tb = tiebreak or (lambda item: item)
    ranked = sorted(scored_items, key=lambda pair: (-pair[1], tb(pair[0])))
    return [item for item, _ in ranked[:n]]


def vote_multi(papers) -> dict[str, int]:
    """Each paper adds one vote to each of its authors."""
    votes: dict[str, int] = {}
    for paper in papers:
        for aid in paper.author_ids:
            votes[aid] = votes.get(aid, 0) + 1
    return votes


def _rank_votes(votes: dict[str, int], index, exclude=()) -> list[tuple[str, int]]:
    """Vote map -> ranked entries with the deterministic author tie-break."""
    excluded = set(exclude)
    entries = [(aid, n) for aid, n in votes.items() if aid not in excluded]
    entries.sort(key=lambda e: (-e[1], -index.author_publication_count(e[0]), e[0]))
    return entries


def get_relevant_papers(committee, feedback: FeedbackSet, model, index,
                        pool: int = RELEVANT_POOL) -> list[str]:
    """Committee members' publications with strictly positive scores, top `pool`."""
    pub_union = sorted({pid for aid in committee
                        for pid in index.author_to_papers.get(aid, ())})
    if not pub_union:
        return []
    scores = scores_with_feedback_many(model, index, pub_union, feedback)
    positive = [(pid, s) for pid, s in zip(pub_union, scores) if s > 0]
    return sort_sample(positive, pool)


def strategy_library(folder_saved_papers, index) -> RankedAuthorList:
    """Authors of the saved + seed papers, by descending frequency."""
    papers = [index.papers_by_id[pid] for pid in sorted(folder_saved_papers)
              if pid in index.papers_by_id]
    votes = vote_multi(papers)
    return RankedAuthorList(Strategy.LIBRARY_EXTRACTED, _rank_votes(votes, index))


def strategy_recent(feedback: FeedbackSet, model, index, now: int,
                    window_days: int = 180, pool: int = RELEVANT_POOL) -> RankedAuthorList:
    """Top-scoring papers published within the window vote on their authors."""
    recent = [pid for pid in index.recency_order
              if 0 <= now - index.papers_by_id[pid].pub_day <= window_days]
    if not recent:
        return RankedAuthorList(Strategy.RECENT_RELEVANT, [])
    scores = scores_with_feedback_many(model, index, recent, feedback)
    top = sort_sample(list(zip(recent, scores)), pool)
    votes = vote_multi(index.papers_by_id[pid] for pid in top)
    return RankedAuthorList(Strategy.RECENT_RELEVANT, _rank_votes(votes, index))


def strategy_coauthor(committee, feedback: FeedbackSet, model, index,
                      user_author_id: str | None = None,
                      pool: int = RELEVANT_POOL) -> RankedAuthorList:
    """Vote over the committee's relevant publications; drop user and committee."""
    relevant = get_relevant_papers(committee, feedback, model, index, pool)
    votes = vote_multi(index.papers_by_id[pid] for pid in relevant)
    exclude = set(committee) | ({user_author_id} if user_author_id else set())
    return RankedAuthorList(Strategy.COAUTHOR_EXPANSION,
                            _rank_votes(votes, index, exclude))


def vote_author(candidate_refs, committee, relevant_pubs, index) -> dict[str, int]:
    """References receive up to one vote per committee member that cites them.

    Member a votes for reference r iff some paper in relevant_pubs[a] cites r
    and a did not author r (self-citation exclusion).
    """
    votes: dict[str, int] = {}
    for aid in committee:
        cited: set[str] = set()
        for pid in relevant_pubs.get(aid, ()):
            cited.update(index.papers_by_id[pid].reference_ids)
        for ref in cited:
            if ref in candidate_refs and aid not in index.papers_by_id[ref].author_ids:
                votes[ref] = votes.get(ref, 0) + 1
    return votes


def strategy_citation(committee, feedback: FeedbackSet, model, index,
                      user_author_id: str | None = None,
                      pool: int = RELEVANT_POOL) -> RankedAuthorList:
    """Expand through the references the committee's relevant papers cite."""
    relevant = get_relevant_papers(committee, feedback, model, index, pool)
    relevant_set = set(relevant)
    relevant_pubs = {
        aid: [pid for pid in index.author_to_papers.get(aid, ()) if pid in relevant_set]
        for aid in committee
    }
    candidate_refs = {ref for pid in relevant
                      for ref in index.papers_by_id[pid].reference_ids}
    ref_votes = vote_author(candidate_refs, committee, relevant_pubs, index)
    top_refs = sort_sample(list(ref_votes.items()), pool)
    votes = vote_multi(index.papers_by_id[pid] for pid in top_refs)
    exclude = set(committee) | ({user_author_id} if user_author_id else set())
    return RankedAuthorList(Strategy.CITATION_EXPANSION,
                            _rank_votes(votes, index, exclude))


def build_lists(index, feedback: FeedbackSet, model, committee, now: int,
                user_author_id: str | None = None, window_days: int = 180,
                pool: int = RELEVANT_POOL) -> dict[Strategy, RankedAuthorList]:
    return {
        Strategy.LIBRARY_EXTRACTED: strategy_library(feedback.saved_ids(), index),
        Strategy.RECENT_RELEVANT: strategy_recent(feedback, model, index, now,
                                                  window_days, pool),
        Strategy.COAUTHOR_EXPANSION: strategy_coauthor(
            committee, feedback, model, index, user_author_id, pool),
        Strategy.CITATION_EXPANSION: strategy_citation(
            committee, feedback, model, index, user_author_id, pool),
    }


def select_batch_authors(state: BatchState, ineligible,
                         per_strategy: int = 2) -> list[tuple[str, Strategy]]:
    """Pick up to per_strategy unserved authors per list, interleaved round-robin.

    Skips committee/blocked/user/served authors and cross-list duplicates
    (first occurrence wins its slot; skipped entries still advance the
    cursor). Mutates cursors and served_author_ids.
    """
    ineligible = set(ineligible)
    picks: dict[Strategy, list[str]] = {s: [] for s in STRATEGY_ORDER}
    chosen: set[str] = set()
    for strat in STRATEGY_ORDER:
        lst = state.lists[strat]
        while len(picks[strat]) < per_strategy and lst.cursor < len(lst.entries):
            aid, _ = lst.entries[lst.cursor]
            lst.cursor += 1
            if aid in ineligible or aid in chosen or aid in state.served_author_ids:
                continue
            picks[strat].append(aid)
            chosen.add(aid)
    interleaved: list[tuple[str, Strategy]] = []
    for round_i in range(per_strategy):
        for strat in STRATEGY_ORDER:
            if round_i < len(picks[strat]):
                interleaved.append((picks[strat][round_i], strat))
    state.served_author_ids.update(chosen)
    state.batch_counter += 1
    return interleaved


def generate_batch(state: BatchState, index, feedback: FeedbackSet, model,
                   committee, blocked=(), user_author_id: str | None = None,
                   batch_size: int = 8, per_strategy: int = 2) -> list:
    """Serve the next batch of AuthorCards.

    Top-`per_strategy` unserved entries per strategy, interleaved, then
    presented by descending unique-evidence ratio. Cards carry all available
    explanations and a score snapshot frozen at serve time. An empty result
    means every list is exhausted.
    """
    from . import explainer

    ineligible = set(committee) | set(blocked)
    if user_author_id:
        ineligible.add(user_author_id)
    selected = select_batch_authors(state, ineligible, per_strategy)
    selected = selected[:batch_size]
    if not selected:
        return []
    pub_union = sorted({pid for aid, _ in selected
                        for pid in index.author_to_papers.get(aid, ())})
    scores = scores_with_feedback_many(model, index, pub_union, feedback)
    score_map = {pid: float(s) for pid, s in zip(pub_union, scores)}
    vote_lookup = {strat: dict(state.lists[strat].entries)
                   for strat in STRATEGY_ORDER}
    cards = [
        explainer.build_card(aid, strat.value, vote_lookup[strat].get(aid, 0),
                             committee, index, score_map, feedback)
        for aid, strat in selected
    ]
    return explainer.presentation_order(cards, index)


def apply_feedback(state: BatchState, index, feedback: FeedbackSet, model,
                   committee, now: int, user_author_id: str | None = None,
                   window_days: int = 180, pool: int = RELEVANT_POOL) -> BatchState:
    """Rebuild all four lists and reset cursors after any feedback event."""
    lists = build_lists(index, feedback, model, committee, now,
                        user_author_id, window_days, pool)
    return BatchState(lists=lists, served_author_ids=set(),
                      batch_counter=state.batch_counter)
