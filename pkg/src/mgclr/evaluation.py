"""Linear evaluation protocol, top-k metrics, cross-subject splits, and
temporal-spatial score fusion."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import torch

from .rng import RandomStream
from .sequence import LabeledSample


class DegenerateSplitError(ValueError):
    """Split cannot support the requested operation (e.g. one class)."""


@dataclass(frozen=True)
class ProbeSchedule:
    """Probe optimizer settings: SGD, momentum 0.9, lr 0.1 for 100
    epochs, decimated after the 50th and 80th epoch."""

    learning_rate: float = 0.1
    momentum: float = 0.9
    epochs: int = 100
    drop_epochs: tuple = (50, 80)
    drop_factor: float = 0.1
    batch_size: int | None = None  # None = full batch (identical optimum, faster)

    def learning_rate_at(self, epoch: int) -> float:
        lr = self.learning_rate
        for boundary in self.drop_epochs:
            if epoch >= boundary:
                lr *= self.drop_factor
        return lr


@dataclass
class LinearProbe:
    """Softmax classifier over frozen embeddings.

    Embeddings are standardized (train-split mean/scale) before the
    affine map; that is an affine reparametrization, so the probe is
    still linear in the raw features.
    """

    weight: np.ndarray          # (dim, num_categories)
    bias: np.ndarray            # (num_categories,)
    feature_mean: np.ndarray
    feature_scale: np.ndarray
    loss_history: list = field(default_factory=list)

    @property
    def num_categories(self) -> int:
        return self.weight.shape[1]

    def scores(self, embeddings: np.ndarray) -> np.ndarray:
        x = (np.asarray(embeddings, dtype=np.float64) - self.feature_mean) / self.feature_scale
        return x @ self.weight + self.bias

    def softmax_scores(self, embeddings: np.ndarray) -> np.ndarray:
        return _softmax(self.scores(embeddings))


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _cross_entropy(logits: np.ndarray, labels: np.ndarray) -> float:
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    return float(-log_probs[np.arange(len(labels)), labels].mean())


def train_probe_on_embeddings(
    embeddings: np.ndarray,
    labels: np.ndarray,
    num_categories: int,
    schedule: ProbeSchedule | None = None,
    seed: int = 0,
) -> LinearProbe:
    """Fit the softmax probe on cached embeddings.

    Full-batch by default (deterministic, convex); mini-batch mode is
    kept for parity with large-scale runs and shuffles via the seed.
    """
    schedule = schedule or ProbeSchedule()
    x = np.asarray(embeddings, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if x.ndim != 2 or len(x) != len(y):
        raise ValueError("embeddings must be (n, dim) aligned with labels")
    present = np.unique(y)
    if len(present) < 2:
        raise DegenerateSplitError(
            f"probe needs at least 2 categories in the train split, found {len(present)}"
        )
    if y.min() < 0 or y.max() >= num_categories:
        raise ValueError("labels outside [0, num_categories)")

    mean = x.mean(axis=0)
    scale = x.std(axis=0)
    scale[scale < 1e-12] = 1.0
    xs = (x - mean) / scale

    dim = x.shape[1]
    w = np.zeros((dim, num_categories))
    b = np.zeros(num_categories)
    vel_w = np.zeros_like(w)
    vel_b = np.zeros_like(b)
    onehot = np.eye(num_categories)[y]
    rng = RandomStream(seed)

    history = []
    for epoch in range(schedule.epochs):
        lr = schedule.learning_rate_at(epoch)
        if schedule.batch_size is None:
            slices = [np.arange(len(y))]
        else:
            order = rng.permutation(len(y))
            slices = [
                order[i : i + schedule.batch_size]
                for i in range(0, len(y), schedule.batch_size)
            ]
        for idx in slices:
            logits = xs[idx] @ w + b
            grad_logits = (_softmax(logits) - onehot[idx]) / len(idx)
            grad_w = xs[idx].T @ grad_logits
            grad_b = grad_logits.sum(axis=0)
            vel_w = schedule.momentum * vel_w + grad_w
            vel_b = schedule.momentum * vel_b + grad_b
            w = w - lr * vel_w
            b = b - lr * vel_b
        history.append(_cross_entropy(xs @ w + b, y))

    return LinearProbe(weight=w, bias=b, feature_mean=mean, feature_scale=scale,
                       loss_history=history)


def embed_samples(encoder: torch.nn.Module, samples: list[LabeledSample],
                  batch_size: int = 64) -> np.ndarray:
    """Cache encoder embeddings for a sample list (encoder frozen)."""
    dtype = next(encoder.parameters()).dtype
    chunks = []
    with torch.no_grad():
        for start in range(0, len(samples), batch_size):
            batch = samples[start : start + batch_size]
            stacked = np.stack([s.sequence.frames for s in batch])
            chunks.append(encoder(torch.as_tensor(stacked, dtype=dtype)).numpy())
    return np.concatenate(chunks, axis=0).astype(np.float64)


def train_linear_probe(
    encoder: torch.nn.Module,
    train_samples: list[LabeledSample],
    num_categories: int,
    schedule: ProbeSchedule | None = None,
    seed: int = 0,
) -> LinearProbe:
    """Linear evaluation: cache embeddings once (encoder frozen), then
    fit the softmax probe under the fixed schedule."""
    embeddings = embed_samples(encoder, train_samples)
    labels = np.array([s.category for s in train_samples])
    return train_probe_on_embeddings(embeddings, labels, num_categories, schedule, seed)


def topk_accuracy(scores: np.ndarray, labels: np.ndarray, k: int) -> float:
    """Percentage of samples whose true label is among the k highest
    scores; ties rank the lower category index first."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if scores.ndim != 2 or len(scores) == 0:
        raise ValueError("scores must be a non-empty (samples, categories) matrix")
    if len(labels) != len(scores):
        raise ValueError("labels misaligned with scores")
    if not 1 <= k <= scores.shape[1]:
        raise ValueError(f"k={k} outside [1, {scores.shape[1]}]")
    ranked = np.argsort(-scores, axis=1, kind="stable")[:, :k]
    hits = (ranked == labels[:, None]).any(axis=1)
    return 100.0 * float(hits.mean())


def predictions(scores: np.ndarray) -> np.ndarray:
    """Argmax with ties broken by lower category index."""
    scores = np.asarray(scores, dtype=np.float64)
    return np.argsort(-scores, axis=1, kind="stable")[:, 0]


def fuse_scores(spatial_softmax: np.ndarray, temporal_softmax: np.ndarray,
                tol: float = 1e-6) -> np.ndarray:
    """Equal-weight elementwise sum of the two streams' softmax scores."""
    s = np.asarray(spatial_softmax, dtype=np.float64)
    t = np.asarray(temporal_softmax, dtype=np.float64)
    if s.shape != t.shape:
        raise ValueError(f"score shapes differ: {s.shape} vs {t.shape}")
    for name, vec in (("spatial", s), ("temporal", t)):
        sums = vec.sum(axis=-1)
        if np.any(np.abs(sums - 1.0) > tol):
            raise ValueError(f"{name} scores are not softmax-normalized (sum != 1)")
    return s + t


def cross_subject_split(
    samples: list[LabeledSample],
    train_subjects,
    test_subjects=None,
) -> tuple[list[LabeledSample], list[LabeledSample]]:
    """Partition by subject id; test defaults to the complement.

    Explicitly declared train/test sets must be disjoint. An empty
    split is allowed but warned about.
    """
    train_set = set(int(s) for s in train_subjects)
    if test_subjects is None:
        test_set = {s.subject_id for s in samples} - train_set
    else:
        test_set = set(int(s) for s in test_subjects)
        overlap = train_set & test_set
        if overlap:
            raise ValueError(f"subjects declared in both splits: {sorted(overlap)}")
    train = [s for s in samples if s.subject_id in train_set]
    test = [s for s in samples if s.subject_id in test_set]
    if not test:
        warnings.warn("cross-subject split produced an empty test set", stacklevel=2)
    if not train:
        warnings.warn("cross-subject split produced an empty train set", stacklevel=2)
    return train, test


@dataclass
class EvalReport:
    """Recognition metrics for one stream (or the fused scores)."""

    stream: str
    top1: float
    top5: float
    per_category: list
    confusion: list
    num_samples: int

    def to_dict(self) -> dict:
        return {
            "stream": self.stream,
            "top1": self.top1,
            "top5": self.top5,
            "num_samples": self.num_samples,
            "per_category": self.per_category,
            "confusion": self.confusion,
        }


def build_report(scores: np.ndarray, labels: np.ndarray, stream: str) -> EvalReport:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    num_categories = scores.shape[1]
    top1 = topk_accuracy(scores, labels, 1)
    top5 = topk_accuracy(scores, labels, min(5, num_categories))
    preds = predictions(scores)
    confusion = np.zeros((num_categories, num_categories), dtype=np.int64)
    for true, pred in zip(labels, preds):
        confusion[true, pred] += 1
    per_category = []
    for cat in range(num_categories):
        total = int(confusion[cat].sum())
        correct = int(confusion[cat, cat])
        per_category.append(
            {
                "category": cat,
                "count": total,
                "correct": correct,
                "accuracy": (100.0 * correct / total) if total else None,
            }
        )
    return EvalReport(
        stream=stream,
        top1=top1,
        top5=top5,
        per_category=per_category,
        confusion=confusion.tolist(),
        num_samples=len(labels),
    )
