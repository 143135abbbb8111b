"""HTTP surface over the folder engine.

Endpoints
  POST /folders                          create a folder from seed papers
  GET  /folders/{id}                     folder state
  POST /folders/{id}/feedback            apply a save/downvote/author action
  POST /folders/{id}/batches             serve the next batch of author cards
  GET  /folders/{id}/authors/{aid}       full card for one author
  GET  /search/authors?q=                name search
  GET  /health                           liveness + corpus stats

Mutating endpoints accept an optional request_id; retrying with the same id
returns the original response without reapplying the action. Per-folder
mutation is serialized behind a lock; reads of the immutable corpus are
lock-free.
"""

from __future__ import annotations

import os
import threading
import uuid

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .config import ApiConfig
from .corpus import CorpusIndex
from .explainer import AuthorCard, build_card
from .scorer import scores_with_feedback_many
from .session import Folder, FolderEngine, SessionError


class CreateFolderRequest(BaseModel):
    topic_name: str
    seed_paper_ids: list[str]
    folder_id: str | None = None
    user_author_id: str | None = None
    request_id: str | None = None


class FeedbackRequest(BaseModel):
    action: str
    subject_id: str
    request_id: str | None = None


class BatchRequest(BaseModel):
    request_id: str | None = None


def card_to_json(card: AuthorCard) -> dict:
    return {
        "author_id": card.author_id,
        "display_name": card.display_name,
        "strategy_origin": card.strategy_origin,
        "vote_count": card.vote_count,
        "tags": [
            {
                "kind": tag.kind.value,
                "committee_author_id": tag.committee_author_id,
                "evidence_paper_ids": sorted(tag.evidence_paper_ids),
                "count": tag.count,
            }
            for tag in card.tags
        ],
        "relevant_paper_count": card.relevant_paper_count,
        "total_paper_count": card.total_paper_count,
        "h_index": card.h_index,
        "citation_count": card.citation_count,
        "histogram": {str(year): {"total": t, "relevant": r}
                      for year, (t, r) in sorted(card.histogram.items())},
        "relevance_ratio": card.relevance_ratio,
        "ranked_publications": card.ranked_publications,
        "score_snapshot": card.score_snapshot,
    }


def folder_to_json(folder: Folder, engine: FolderEngine) -> dict:
    return {
        "folder_id": folder.folder_id,
        "topic_name": folder.topic_name,
        "seed_paper_ids": list(folder.seed_paper_ids),
        "saved_paper_ids": sorted(folder.feedback.saved_ids()),
        "downvoted_paper_ids": sorted(folder.feedback.downvoted_ids()),
        "committee": list(folder.committee),
        "blocked_author_ids": sorted(folder.blocked_author_ids),
        "user_author_id": folder.user_author_id,
        "model_version": folder.model_version,
        "seed_warning": folder.seed_warning,
        "batch_counter": folder.batch_state.batch_counter
        if folder.batch_state else 0,
    }


def search_authors(index: CorpusIndex, query: str) -> list[dict]:
    """Case-insensitive substring match on display names, most-published first."""
    q = query.strip().lower()
    if not q:
        return []
    hits = [a for a in index.authors_by_id.values() if q in a.display_name.lower()]
    hits.sort(key=lambda a: (-len(a.paper_ids), a.author_id))
    return [
        {"author_id": a.author_id, "display_name": a.display_name,
         "publication_count": len(a.paper_ids), "h_index": a.h_index,
         "citation_count": a.citation_count}
        for a in hits
    ]


class ServiceState:
    def __init__(self, index: CorpusIndex, config: ApiConfig):
        self.index = index
        self.config = config
        self.engine = FolderEngine(index, config.engine_config(),
                                   trace_path=config.trace_path)
        self.folders: dict[str, Folder] = {}
        self.locks: dict[str, threading.Lock] = {}
        self.replies: dict[tuple[str, str], dict] = {}
        self.global_lock = threading.Lock()

    def lock_for(self, folder_id: str) -> threading.Lock:
        with self.global_lock:
            return self.locks.setdefault(folder_id, threading.Lock())

    def folder(self, folder_id: str) -> Folder:
        try:
            return self.folders[folder_id]
        except KeyError:
            raise HTTPException(404, f"unknown folder {folder_id}") from None

    def flush_snapshots(self) -> None:
        if not self.config.snapshot_dir:
            return
        os.makedirs(self.config.snapshot_dir, exist_ok=True)
        for fid, folder in self.folders.items():
            self.engine.snapshot(
                folder, os.path.join(self.config.snapshot_dir, f"{fid}.json"))


def create_app(index: CorpusIndex, config: ApiConfig | None = None) -> FastAPI:
    config = config or ApiConfig()
    state = ServiceState(index, config)

    from contextlib import asynccontextmanager

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        state.flush_snapshots()

    app = FastAPI(title="authorscout", lifespan=lifespan)
    app.state.service = state

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "papers": len(index),
            "authors": len(index.authors_by_id),
            "dangling_ref_count": index.dangling_ref_count,
            "embedding_dim": index.embedding_dim,
        }

    @app.post("/folders")
    def create_folder(req: CreateFolderRequest):
        key = ("__create__", req.request_id) if req.request_id else None
        if key and key in state.replies:
            return state.replies[key]
        folder_id = req.folder_id or uuid.uuid4().hex[:12]
        with state.lock_for(folder_id):
            if folder_id in state.folders:
                raise HTTPException(409, f"folder {folder_id} already exists")
            try:
                folder = state.engine.create_folder(folder_id, req.topic_name,
                                                    req.seed_paper_ids)
            except SessionError as exc:
                raise HTTPException(400, str(exc)) from exc
            folder.user_author_id = req.user_author_id
            state.folders[folder_id] = folder
            reply = folder_to_json(folder, state.engine)
        if key:
            state.replies[key] = reply
        return reply

    @app.get("/folders/{folder_id}")
    def get_folder(folder_id: str):
        return folder_to_json(state.folder(folder_id), state.engine)

    @app.post("/folders/{folder_id}/feedback")
    def post_feedback(folder_id: str, req: FeedbackRequest):
        folder = state.folder(folder_id)
        key = (folder_id, req.request_id) if req.request_id else None
        if key and key in state.replies:
            return state.replies[key]
        with state.lock_for(folder_id):
            try:
                state.engine.record_feedback(folder, req.action, req.subject_id)
            except SessionError as exc:
                raise HTTPException(400, str(exc)) from exc
            reply = folder_to_json(folder, state.engine)
        if key:
            state.replies[key] = reply
        return reply

    @app.post("/folders/{folder_id}/batches")
    def post_batch(folder_id: str, req: BatchRequest | None = None):
        folder = state.folder(folder_id)
        request_id = req.request_id if req else None
        key = (folder_id, request_id) if request_id else None
        if key and key in state.replies:
            return state.replies[key]
        with state.lock_for(folder_id):
            cards = state.engine.next_batch(folder)
            reply = {
                "folder_id": folder_id,
                "model_version": folder.model_version,
                "batch_counter": folder.batch_state.batch_counter,
                "cards": [card_to_json(c) for c in cards],
            }
        if key:
            state.replies[key] = reply
        return reply

    @app.get("/folders/{folder_id}/authors/{author_id}")
    def get_author_card(folder_id: str, author_id: str):
        folder = state.folder(folder_id)
        if author_id not in index.authors_by_id:
            raise HTTPException(404, f"unknown author {author_id}")
        with state.lock_for(folder_id):
            model = state.engine.models[folder_id]
            pubs = sorted(index.author_to_papers.get(author_id, ()))
            scores = scores_with_feedback_many(model, index, pubs,
                                               folder.feedback)
            score_map = {pid: float(s) for pid, s in zip(pubs, scores)}
            card = build_card(author_id, "details", 0, folder.committee,
                              index, score_map, folder.feedback)
            state.engine._trace(folder, "OpenAuthorDetails", author_id)
        return {"model_version": folder.model_version,
                "card": card_to_json(card)}

    @app.get("/search/authors")
    def search(q: str = ""):
        return {"query": q, "results": search_authors(index, q)}

    return app


def serve(index: CorpusIndex, config: ApiConfig) -> None:
    import uvicorn

    app = create_app(index, config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
