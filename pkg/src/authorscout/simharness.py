"""Synthetic planted-community corpora and scripted agents.

The generator plants n_communities of authors with community-specific
vocabularies and embedding clusters, then draws coauthorship and citation
edges by the configured probabilities. Scripted agents drive the full
recommend/feedback loop against such a corpus so that recommendation
dynamics (does committee curation pull the batches toward the agent's
community?) can be checked without humans.

IDs encode the planted community: author "C3A07", paper "C3A07P02".
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .corpus import CorpusIndex, load_corpus
from .session import EngineConfig, FolderEngine

SIM_NOW = 20000  # days-since-epoch "today" for generated corpora
SIM_SPAN_DAYS = 1500

POLICIES = ("greedy-community-0", "random", "novelty-seeking")


class SimError(Exception):
    pass


@dataclass(frozen=True)
class SimParams:
    n_communities: int = 5
    authors_per_community: int = 20
    papers_per_author: int = 20
    intra_coauthor_prob: float = 0.5
    intra_cite_prob: float = 0.6
    cross_cite_prob: float = 0.05
    vocab_per_community: int = 60
    embedding_dim: int = 16
    seed: int = 0

    def validate(self) -> None:
        for name in ("intra_coauthor_prob", "intra_cite_prob", "cross_cite_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise SimError(f"{name} must be in [0, 1], got {p}")
        for name in ("n_communities", "authors_per_community",
                     "papers_per_author", "vocab_per_community",
                     "embedding_dim"):
            if getattr(self, name) <= 0:
                raise SimError(f"{name} must be positive")


def community_of(entity_id: str) -> int:
    return int(entity_id[1:entity_id.index("A")])


def generate_corpus(params: SimParams, out_path) -> str:
    """Write a deterministic planted-community corpus as JSONL; returns the path."""
    params.validate()
    rng = np.random.default_rng(params.seed)
    n_total = (params.n_communities * params.authors_per_community
               * params.papers_per_author)

    centers = rng.normal(size=(params.n_communities, params.embedding_dim))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)

    def words(comm: int, n: int) -> list[str]:
        out = []
        for _ in range(n):
            if rng.random() < 0.75:
                out.append(f"c{comm}word{rng.integers(params.vocab_per_community):03d}")
            else:
                out.append(f"common{rng.integers(40):03d}")
        return out

    # Primary author per paper, round-robin within each community.
    plan = []  # (community, primary author idx, serial)
    for c in range(params.n_communities):
        for a in range(params.authors_per_community):
            for k in range(params.papers_per_author):
                plan.append((c, a, k))
    order = rng.permutation(len(plan))  # publication order

    records = []
    ids_in_order = []
    earlier_by_comm: dict[int, list[str]] = {c: [] for c in range(params.n_communities)}
    for t, plan_i in enumerate(order):
        c, a, k = plan[plan_i]
        pid = f"C{c}A{a:02d}P{k:02d}"
        pub_day = SIM_NOW - SIM_SPAN_DAYS + int((t + 1) * SIM_SPAN_DAYS / n_total)
        authors = [f"C{c}A{a:02d}"]
        for _ in range(2):
            if rng.random() < params.intra_coauthor_prob:
                other = int(rng.integers(params.authors_per_community))
                coid = f"C{c}A{other:02d}"
                if coid not in authors:
                    authors.append(coid)
        refs: set[str] = set()
        earlier_same = earlier_by_comm[c]
        n_other = len(ids_in_order) - len(earlier_same)
        for _ in range(6):
            if earlier_same and rng.random() < params.intra_cite_prob:
                refs.add(earlier_same[int(rng.integers(len(earlier_same)))])
            if n_other and rng.random() < params.cross_cite_prob:
                # Rejection-sample an earlier paper from another community.
                for _attempt in range(20):
                    q = ids_in_order[int(rng.integers(len(ids_in_order)))]
                    if community_of(q) != c:
                        refs.add(q)
                        break
        refs.discard(pid)
        embedding = centers[c] + 0.25 * rng.normal(size=params.embedding_dim)
        records.append({
            "paper_id": pid,
            "title": " ".join(words(c, 5)),
            "abstract": " ".join(words(c, 24)),
            "year": 1970 + pub_day // 365,
            "pub_day": pub_day,
            "author_ids": authors,
            "reference_ids": sorted(refs),
            "embedding": [round(float(x), 6) for x in embedding],
            "authors": [{"author_id": aid, "display_name": f"Author {aid}"}
                        for aid in authors],
        })
        ids_in_order.append(pid)
        earlier_by_comm[c].append(pid)

    with open(out_path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    return str(out_path)


@dataclass
class BatchMetrics:
    batch_index: int
    community_hit_fraction: float
    saved_author_count: int
    novel_author_fraction: float
    saved_paper_fraction: float
    mean_saved_paper_score: float

    FIELDS = ("batch_index", "community_hit_fraction", "saved_author_count",
              "novel_author_fraction", "saved_paper_fraction",
              "mean_saved_paper_score")

    def row(self) -> list:
        return [getattr(self, f) for f in self.FIELDS]


@dataclass
class SimMetrics:
    policy: str
    seed: int
    batches: list[BatchMetrics] = field(default_factory=list)


def _seed_papers(index: CorpusIndex, community: int, n: int = 5) -> list[str]:
    pids = sorted(p for p in index.papers_by_id if community_of(p) == community)
    step = max(1, len(pids) // n)
    return pids[::step][:n]


def run_agent(index: CorpusIndex, policy: str, steps: int, seed: int = 0,
              engine_config: EngineConfig | None = None,
              target_community: int = 0, judge_per_card: int = 1) -> SimMetrics:
    """Drive the engine with a scripted judging policy; metrics per batch."""
    if policy not in POLICIES:
        raise SimError(f"unknown policy {policy!r}; choose from {POLICIES}")
    cfg = engine_config or EngineConfig(seed=seed, now=SIM_NOW)
    engine = FolderEngine(index, cfg)
    rng = np.random.default_rng(seed)
    folder = engine.create_folder(f"sim-{policy}-{seed}", f"community {target_community}",
                                  _seed_papers(index, target_community))
    metrics = SimMetrics(policy=policy, seed=seed)
    saved_authors: list[str] = []

    def judge_batch(cards) -> None:
        """Apply the policy's feedback for one served batch."""
        for card in cards:
            comm = community_of(card.author_id)
            block_author = False
            if policy == "greedy-community-0":
                save_author = comm == target_community
                block_author = not save_author
            elif policy == "random":
                save_author = bool(rng.random() < 0.5)
                block_author = not save_author
            else:  # novelty-seeking: prefer communities not saved yet
                seen = {community_of(a) for a in saved_authors}
                save_author = comm not in seen or bool(rng.random() < 0.25)
            if save_author:
                engine.record_feedback(folder, "SaveAuthor", card.author_id)
                saved_authors.append(card.author_id)
            elif block_author:
                engine.record_feedback(folder, "BlockAuthor", card.author_id)
            # Judge this author's top unjudged papers by their planted labels.
            unjudged = card.ranked_publications["unjudged"]
            for entry in unjudged[:judge_per_card]:
                pid = entry["paper_id"]
                if policy == "random":
                    action = "SavePaper" if rng.random() < 0.5 else "DownvotePaper"
                else:
                    relevant = community_of(pid) == target_community
                    action = "SavePaper" if relevant else "DownvotePaper"
                engine.record_feedback(folder, action, pid)

    def collect(batch_index: int, cards) -> None:
        hits = sum(1 for c in cards
                   if community_of(c.author_id) == target_community)
        hit_frac = hits / len(cards) if cards else 0.0
        novel = sum(1 for a in saved_authors
                    if community_of(a) != target_community)
        novel_frac = novel / len(saved_authors) if saved_authors else 0.0
        saved = folder.feedback.saved_ids() - set(folder.seed_paper_ids)
        downvoted = folder.feedback.downvoted_ids()
        judged = len(saved) + len(downvoted)
        saved_frac = len(saved) / judged if judged else 0.0
        model = engine.models[folder.folder_id]
        scores = [model.score(index.papers_by_id[p]) for p in sorted(saved)]
        metrics.batches.append(BatchMetrics(
            batch_index=batch_index,
            community_hit_fraction=hit_frac,
            saved_author_count=len(saved_authors),
            novel_author_fraction=novel_frac,
            saved_paper_fraction=saved_frac,
            mean_saved_paper_score=float(np.mean(scores)) if scores else 0.0,
        ))

    cards = engine.next_batch(folder)
    collect(0, cards)
    for step in range(steps):
        judge_batch(cards)
        cards = engine.next_batch(folder)
        collect(step + 1, cards)
    return metrics


def write_metrics_csv(runs: list[SimMetrics], path) -> None:
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("policy", "seed") + BatchMetrics.FIELDS)
        for run in runs:
            for bm in run.batches:
                writer.writerow([run.policy, run.seed] + bm.row())
