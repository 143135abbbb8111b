"""Mutable per-topic state: folders, committee, feedback, traces, snapshots.

Each folder owns its feedback set, committee, and batch state. Every
feedback event retrains the relevance model (bumping model_version),
rebuilds the four strategy lists, and appends a trace record. Mutation is
single-writer per folder; the corpus index itself is never mutated.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from . import recommender
from .corpus import CorpusIndex
from .scorer import (DOWNVOTED, SAVED, FeedbackSet, ScorerConfig,
                     train)

SNAPSHOT_FORMAT_VERSION = 1

ACTIONS = ("SavePaper", "DownvotePaper", "UndoPaper", "SaveAuthor",
           "BlockAuthor", "RemoveAuthor", "LoadBatch", "OpenAuthorDetails",
           "SearchAuthor")


class SessionError(Exception):
    pass


@dataclass
class TraceEvent:
    timestamp: float
    folder_id: str
    action: str
    subject_id: str | None = None
    context: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"timestamp": self.timestamp, "folder_id": self.folder_id,
                "action": self.action, "subject_id": self.subject_id,
                "context": self.context}

    @classmethod
    def from_json(cls, obj: dict) -> "TraceEvent":
        return cls(obj["timestamp"], obj["folder_id"], obj["action"],
                   obj.get("subject_id"), obj.get("context") or {})


@dataclass
class Folder:
    folder_id: str
    topic_name: str
    seed_paper_ids: tuple[str, ...]
    feedback: FeedbackSet
    committee: list[str] = field(default_factory=list)
    blocked_author_ids: set[str] = field(default_factory=set)
    user_author_id: str | None = None
    batch_state: recommender.BatchState | None = None
    model_version: int = 0
    seed_warning: bool = False
    trace: list[TraceEvent] = field(default_factory=list)
    _event_clock: int = 0


@dataclass(frozen=True)
class EngineConfig:
    seed: int = 0
    now: int | None = None  # days since epoch; wall clock when None
    batch_size: int = 8
    per_strategy: int = 2
    recency_window_days: int = 180
    pool_size: int = 100
    min_seeds_without_warning: int = 5
    retrain_per_event: bool = True
    scorer: ScorerConfig = field(default_factory=ScorerConfig)


class FolderEngine:
    """Drives one folder's recommend/feedback loop over a shared corpus."""

    def __init__(self, index: CorpusIndex, config: EngineConfig | None = None,
                 trace_path=None):
        self.index = index
        self.config = config or EngineConfig()
        self.trace_path = trace_path
        self.models: dict[str, object] = {}

    @property
    def now(self) -> int:
        if self.config.now is not None:
            return self.config.now
        return int(time.time() // 86400)

    def create_folder(self, folder_id: str, topic_name: str,
                      seed_paper_ids) -> Folder:
        seeds = tuple(dict.fromkeys(seed_paper_ids))
        if not seeds:
            raise SessionError("at least one seed paper is required")
        unknown = [pid for pid in seeds if pid not in self.index.papers_by_id]
        if unknown:
            raise SessionError(f"unknown seed paper ids: {unknown}")
        folder = Folder(
            folder_id=folder_id,
            topic_name=topic_name,
            seed_paper_ids=seeds,
            feedback=FeedbackSet(seed_paper_ids=frozenset(seeds)),
            seed_warning=len(seeds) < self.config.min_seeds_without_warning,
        )
        self._retrain_and_rebuild(folder)
        return folder

    def _retrain_and_rebuild(self, folder: Folder) -> None:
        model = train(self.index, folder.feedback, self.config.seed,
                      self.config.scorer)
        self.models[folder.folder_id] = model
        folder.model_version += 1
        lists = recommender.build_lists(
            self.index, folder.feedback, model, folder.committee, self.now,
            folder.user_author_id, self.config.recency_window_days,
            self.config.pool_size)
        served = folder.batch_state.batch_counter if folder.batch_state else 0
        folder.batch_state = recommender.BatchState(lists=lists,
                                                    batch_counter=served)

    def _trace(self, folder: Folder, action: str, subject_id=None,
               context=None) -> None:
        folder._event_clock += 1
        event = TraceEvent(timestamp=float(folder._event_clock),
                           folder_id=folder.folder_id, action=action,
                           subject_id=subject_id, context=context or {})
        folder.trace.append(event)
        if self.trace_path:
            with open(self.trace_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(event.to_json()) + "\n")

    def record_feedback(self, folder: Folder, action: str,
                        subject_id: str) -> Folder:
        """Apply a save/downvote/author action; retrain and rebuild lists."""
        if action not in ACTIONS:
            raise SessionError(f"unknown action {action!r}")
        context: dict = {}
        if action in ("SavePaper", "DownvotePaper", "UndoPaper"):
            if subject_id not in self.index.papers_by_id:
                raise SessionError(f"unknown paper id {subject_id}")
            model = self.models.get(folder.folder_id)
            if model is not None:
                context["score_before"] = float(
                    model.score(self.index.papers_by_id[subject_id]))
            if action == "SavePaper":
                folder.feedback.record(subject_id, SAVED,
                                       float(folder._event_clock + 1))
            elif action == "DownvotePaper":
                folder.feedback.record(subject_id, DOWNVOTED,
                                       float(folder._event_clock + 1))
            else:
                folder.feedback.remove(subject_id)
        elif action == "SaveAuthor":
            if subject_id not in self.index.authors_by_id:
                raise SessionError(f"unknown author id {subject_id}")
            if subject_id in folder.blocked_author_ids:
                raise SessionError(f"author {subject_id} is blocked")
            if subject_id not in folder.committee:
                folder.committee.append(subject_id)
        elif action == "BlockAuthor":
            if subject_id not in self.index.authors_by_id:
                raise SessionError(f"unknown author id {subject_id}")
            if subject_id in folder.committee:
                folder.committee.remove(subject_id)
            folder.blocked_author_ids.add(subject_id)
        elif action == "RemoveAuthor":
            if subject_id in folder.committee:
                folder.committee.remove(subject_id)
            folder.blocked_author_ids.discard(subject_id)
        else:
            raise SessionError(f"action {action!r} is not a feedback event")
        self._trace(folder, action, subject_id, context)
        if self.config.retrain_per_event:
            self._retrain_and_rebuild(folder)
        return folder

    def refresh(self, folder: Folder) -> None:
        """Explicit retrain + rebuild, for debounced configurations."""
        self._retrain_and_rebuild(folder)

    def next_batch(self, folder: Folder) -> list:
        if folder.batch_state is None:
            self._retrain_and_rebuild(folder)
        model = self.models[folder.folder_id]
        cards = recommender.generate_batch(
            folder.batch_state, self.index, folder.feedback, model,
            folder.committee, folder.blocked_author_ids,
            folder.user_author_id, self.config.batch_size,
            self.config.per_strategy)
        self._trace(folder, "LoadBatch", None, {
            "batch_counter": folder.batch_state.batch_counter,
            "card_author_ids": [c.author_id for c in cards],
        })
        return cards

    # -- persistence ------------------------------------------------------

    def snapshot(self, folder: Folder, path) -> None:
        """Write the folder as one JSON document (weights are recomputed on restore)."""
        doc = {
            "format_version": SNAPSHOT_FORMAT_VERSION,
            "folder_id": folder.folder_id,
            "topic_name": folder.topic_name,
            "seed_paper_ids": list(folder.seed_paper_ids),
            "feedback": [
                {"paper_id": pid, "label": lab, "timestamp": ts}
                for pid, (lab, ts) in sorted(folder.feedback._labels.items())
            ],
            "committee": list(folder.committee),
            "blocked_author_ids": sorted(folder.blocked_author_ids),
            "user_author_id": folder.user_author_id,
            "model_version": folder.model_version,
            "seed_warning": folder.seed_warning,
            "event_clock": folder._event_clock,
            "batch_counter": folder.batch_state.batch_counter
            if folder.batch_state else 0,
            "served_author_ids": sorted(folder.batch_state.served_author_ids)
            if folder.batch_state else [],
            "cursors": {s.value: folder.batch_state.lists[s].cursor
                        for s in recommender.STRATEGY_ORDER}
            if folder.batch_state else {},
            "trace": [e.to_json() for e in folder.trace],
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)

    def restore(self, path) -> Folder:
        """Rebuild a folder from a snapshot; model weights retrain deterministically."""
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise SessionError(f"cannot restore snapshot {path}: {exc}") from exc
        if doc.get("format_version") != SNAPSHOT_FORMAT_VERSION:
            raise SessionError(
                f"snapshot format version mismatch: {doc.get('format_version')}")
        feedback = FeedbackSet(seed_paper_ids=frozenset(doc["seed_paper_ids"]))
        for entry in doc["feedback"]:
            feedback.record(entry["paper_id"], entry["label"], entry["timestamp"])
        folder = Folder(
            folder_id=doc["folder_id"],
            topic_name=doc["topic_name"],
            seed_paper_ids=tuple(doc["seed_paper_ids"]),
            feedback=feedback,
            committee=list(doc["committee"]),
            blocked_author_ids=set(doc["blocked_author_ids"]),
            user_author_id=doc.get("user_author_id"),
            model_version=doc["model_version"] - 1,
            seed_warning=doc["seed_warning"],
            trace=[TraceEvent.from_json(e) for e in doc.get("trace", [])],
            _event_clock=doc.get("event_clock", 0),
        )
        self._retrain_and_rebuild(folder)
        state = folder.batch_state
        state.batch_counter = doc.get("batch_counter", 0)
        state.served_author_ids = set(doc.get("served_author_ids", []))
        for s in recommender.STRATEGY_ORDER:
            state.lists[s].cursor = doc.get("cursors", {}).get(s.value, 0)
        return folder

    # -- replay -----------------------------------------------------------

    def replay(self, trace_events, folder_id: str, topic_name: str,
               seed_paper_ids) -> tuple[Folder, list[list]]:
        """Re-run a trace against a fresh folder; returns folder + batches."""
        folder = self.create_folder(folder_id, topic_name, seed_paper_ids)
        batches = []
        for event in trace_events:
            if event.action == "LoadBatch":
                batches.append(self.next_batch(folder))
            elif event.action in ("OpenAuthorDetails", "SearchAuthor"):
                self._trace(folder, event.action, event.subject_id,
                            event.context)
            else:
                self.record_feedback(folder, event.action, event.subject_id)
        return folder, batches


def load_trace(path) -> list[TraceEvent]:
    events = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                events.append(TraceEvent.from_json(json.loads(line)))
    return events
