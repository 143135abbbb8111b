"""Ensemble paper-relevance model.

Two independent max-margin linear classifiers, one over tf-idf text features
(title + abstract unigrams and bigrams) and one over dense document
embeddings when the corpus ships them. Each component's decision value is
clamped to [-1, 1] and the score is the mean of the available components.
User feedback always overrides the model: saved papers score +1, downvoted
papers score -1.

Training is plain full-batch subgradient descent on the hinge loss with a
fixed schedule, so equal inputs and seed give bitwise-equal weights.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

_TOKEN_RE = re.compile(r"[a-z0-9]+")

SAVED = 1
DOWNVOTED = -1


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop single-char tokens, add bigrams."""
    unigrams = [t for t in _TOKEN_RE.findall(text.lower()) if len(t) > 1]
    bigrams = [f"{a} {b}" for a, b in zip(unigrams, unigrams[1:])]
    return unigrams + bigrams


@dataclass(frozen=True)
class TextFeatures:
    """Corpus-level vocabulary, idf table, and per-paper tf-idf rows."""

    vocabulary: dict[str, int]
    idf: np.ndarray
    row_of: dict[str, int]
    matrix: sp.csr_matrix  # L2-normalized tf-idf, one row per paper

    @classmethod
    def from_corpus(cls, index) -> "TextFeatures":
        paper_ids = sorted(index.papers_by_id)
        docs = [tokenize(index.papers_by_id[pid].title + " " +
                         index.papers_by_id[pid].abstract)
                for pid in paper_ids]
        vocab: dict[str, int] = {}
        df: dict[str, int] = {}
        for toks in docs:
            for t in set(toks):
                df[t] = df.get(t, 0) + 1
        for t in sorted(df):
            vocab[t] = len(vocab)
        n = len(docs)
        idf = np.zeros(len(vocab))
        for t, j in vocab.items():
            idf[j] = np.log((1.0 + n) / (1.0 + df[t])) + 1.0
        data, indices, indptr = [], [], [0]
        for toks in docs:
            counts: dict[int, int] = {}
            for t in toks:
                j = vocab.get(t)
                if j is not None:
                    counts[j] = counts.get(j, 0) + 1
            for j in sorted(counts):
                indices.append(j)
                data.append(counts[j] * idf[j])
            indptr.append(len(indices))
        mat = sp.csr_matrix((np.asarray(data, dtype=np.float64),
                             np.asarray(indices, dtype=np.int64),
                             np.asarray(indptr, dtype=np.int64)),
                            shape=(n, len(vocab)))
        norms = np.sqrt(mat.multiply(mat).sum(axis=1)).A1
        norms[norms == 0] = 1.0
        mat = sp.diags(1.0 / norms) @ mat
        return cls(vocabulary=vocab, idf=idf,
                   row_of={pid: i for i, pid in enumerate(paper_ids)},
                   matrix=mat.tocsr())

    def vectorize(self, title: str, abstract: str) -> sp.csr_matrix:
        """Tf-idf row for text outside the corpus (e.g. ad-hoc scoring)."""
        counts: dict[int, int] = {}
        for t in tokenize(title + " " + abstract):
            j = self.vocabulary.get(t)
            if j is not None:
                counts[j] = counts.get(j, 0) + 1
        cols = sorted(counts)
        data = np.array([counts[j] * self.idf[j] for j in cols], dtype=np.float64)
        norm = np.linalg.norm(data)
        if norm > 0:
            data /= norm
        return sp.csr_matrix((data, (np.zeros(len(cols), dtype=np.int64), cols)),
                             shape=(1, len(self.vocabulary)))


@dataclass(frozen=True)
class ScorerConfig:
    epochs: int = 200
    learning_rate: float = 0.5
    lr_decay: float = 0.02
    regularization: float = 1.0
    pseudo_negatives: int = 25
    include_seeds_as_positives: bool = True


@dataclass
class FeedbackSet:
    """Current paper judgments plus the seed papers (treated as Saved)."""

    seed_paper_ids: frozenset[str] = frozenset()
    _labels: dict[str, tuple[int, float]] = field(default_factory=dict)

    def record(self, paper_id: str, label: int, timestamp: float) -> None:
        if label not in (SAVED, DOWNVOTED):
            raise ValueError(f"bad label {label}")
        self._labels[paper_id] = (label, timestamp)

    def remove(self, paper_id: str) -> None:
        self._labels.pop(paper_id, None)

    def label_of(self, paper_id: str) -> int | None:
        if paper_id in self._labels:
            return self._labels[paper_id][0]
        if paper_id in self.seed_paper_ids:
            return SAVED
        return None

    def timestamp_of(self, paper_id: str) -> float | None:
        entry = self._labels.get(paper_id)
        return entry[1] if entry else None

    def saved_ids(self) -> set[str]:
        out = {p for p, (lab, _) in self._labels.items() if lab == SAVED}
        return out | set(self.seed_paper_ids)

    def downvoted_ids(self) -> set[str]:
        return {p for p, (lab, _) in self._labels.items() if lab == DOWNVOTED}

    def judged_ids(self) -> set[str]:
        return set(self._labels)

    def items(self):
        return {p: lab for p, (lab, _) in self._labels.items()}

    def copy(self) -> "FeedbackSet":
        return FeedbackSet(self.seed_paper_ids, dict(self._labels))


def _fit_linear(X, y: np.ndarray, cfg: ScorerConfig) -> tuple[np.ndarray, float]:
    """Full-batch subgradient descent on L2-regularized hinge loss."""
    n, d = X.shape
    w = np.zeros(d)
    b = 0.0
    for epoch in range(cfg.epochs):
        eta = cfg.learning_rate / (1.0 + cfg.lr_decay * epoch)
        margins = y * (X @ w + b)
        viol = margins < 1.0
        coef = (y * viol) / n
        grad_w = cfg.regularization * w - X.T @ coef
        grad_b = -coef.sum()
        w = w - eta * grad_w
        b = b - eta * grad_b
    return w, b


class ScorerError(Exception):
    pass


@dataclass(frozen=True)
class LinearComponent:
    weights: np.ndarray
    bias: float


@dataclass(frozen=True)
class RelevanceModel:
    text_component: LinearComponent
    embedding_component: LinearComponent | None
    train_seed: int
    trained_on: tuple[int, int]  # (positives, negatives)
    _index: object = field(compare=False, repr=False, default=None)

    def component_decisions(self, paper) -> dict[str, float]:
        """Raw (unclamped) decision values per available component."""
        feats: TextFeatures = self._index.text_features
        row = feats.matrix[feats.row_of[paper.paper_id]] \
            if paper.paper_id in feats.row_of \
            else feats.vectorize(paper.title, paper.abstract)
        out = {"text": float((row @ self.text_component.weights)[0]
                             + self.text_component.bias)}
        if self.embedding_component is not None and paper.embedding is not None:
            out["embedding"] = float(paper.embedding @ self.embedding_component.weights
                                     + self.embedding_component.bias)
        return out

    def score(self, paper) -> float:
        decisions = self.component_decisions(paper)
        clamped = [min(1.0, max(-1.0, v)) for v in decisions.values()]
        return sum(clamped) / len(clamped)

    def score_many(self, paper_ids: list[str]) -> np.ndarray:
        """Vectorized score over corpus papers (same clamp-then-mean rule)."""
        index = self._index
        feats: TextFeatures = index.text_features
        rows = np.array([feats.row_of[pid] for pid in paper_ids], dtype=np.int64)
        if len(rows) == 0:
            return np.zeros(0)
        text_dec = feats.matrix[rows] @ self.text_component.weights \
            + self.text_component.bias
        text_dec = np.clip(text_dec, -1.0, 1.0)
        if self.embedding_component is None:
            return text_dec
        emb_dec = np.full(len(paper_ids), np.nan)
        for i, pid in enumerate(paper_ids):
            emb = index.papers_by_id[pid].embedding
            if emb is not None:
                emb_dec[i] = emb @ self.embedding_component.weights \
                    + self.embedding_component.bias
        emb_dec = np.clip(emb_dec, -1.0, 1.0)
        has_emb = ~np.isnan(emb_dec)
        out = text_dec.copy()
        out[has_emb] = (text_dec[has_emb] + emb_dec[has_emb]) / 2.0
        return out


def train(index, feedback: FeedbackSet, seed: int,
          config: ScorerConfig | None = None) -> RelevanceModel:
    """Fit both ensemble components on the current feedback labels."""
    cfg = config or ScorerConfig()
    if len(index) == 0:
        raise ScorerError("cannot train on an empty corpus")
    positives = sorted(p for p in feedback.saved_ids() if p in index.papers_by_id)
    if not cfg.include_seeds_as_positives:
        positives = sorted((feedback.saved_ids() - set(feedback.seed_paper_ids))
                           & set(index.papers_by_id))
    negatives = sorted(p for p in feedback.downvoted_ids()
                       if p in index.papers_by_id and p not in positives)
    if not positives:
        raise ScorerError("training requires at least one positive example")
    if not negatives:
        # Cold start: seeded uniform pseudo-negatives from the non-positive corpus.
        pool = sorted(set(index.papers_by_id) - set(positives))
        if pool:
            rng = np.random.default_rng(seed)
            k = min(cfg.pseudo_negatives, len(pool))
            negatives = sorted(rng.choice(pool, size=k, replace=False).tolist())

    train_ids = positives + negatives
    y = np.array([1.0] * len(positives) + [-1.0] * len(negatives))

    feats: TextFeatures = index.text_features
    rows = np.array([feats.row_of[pid] for pid in train_ids], dtype=np.int64)
    Xtext = feats.matrix[rows]
    w, b = _fit_linear(Xtext, y, cfg)
    text_component = LinearComponent(w, b)

    embedding_component = None
    if index.embedding_dim is not None:
        keep = [i for i, pid in enumerate(train_ids)
                if index.papers_by_id[pid].embedding is not None]
        if keep and any(y[i] > 0 for i in keep):
            Xemb = np.stack([index.papers_by_id[train_ids[i]].embedding
                             for i in keep])
            we, be = _fit_linear(Xemb, y[keep], cfg)
            embedding_component = LinearComponent(we, be)

    return RelevanceModel(
        text_component=text_component,
        embedding_component=embedding_component,
        train_seed=seed,
        trained_on=(len(positives), len(negatives)),
        _index=index,
    )


def score(model: RelevanceModel, paper) -> float:
    return model.score(paper)


def score_with_feedback(model, paper, feedback: FeedbackSet) -> float:
    """Model score, overridden by user feedback: saved/seed +1, downvoted -1."""
    label = feedback.label_of(paper.paper_id)
    if label == SAVED:
        return 1.0
    if label == DOWNVOTED:
        return -1.0
    return model.score(paper)


def scores_with_feedback_many(model, index, paper_ids: list[str],
                              feedback: FeedbackSet) -> np.ndarray:
    """Vectorized score_with_feedback; falls back to per-paper model.score."""
    if hasattr(model, "score_many"):
        out = np.asarray(model.score_many(list(paper_ids)), dtype=np.float64)
    else:
        out = np.array([model.score(index.papers_by_id[pid]) for pid in paper_ids])
    for i, pid in enumerate(paper_ids):
        label = feedback.label_of(pid)
        if label == SAVED:
            out[i] = 1.0
        elif label == DOWNVOTED:
            out[i] = -1.0
    return out
