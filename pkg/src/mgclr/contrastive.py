"""Momentum-contrastive pretext training shared by both streams:
query/key encoder pairs, the negative-key queue, the temperature-scaled
instance-discrimination loss, and the optimization loop."""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field

import numpy as np
import torch

from .augment import AugmentationConfig, AugmentationPolicy, sample_positive_pair
from .rng import RandomStream
from .sequence import LabeledSample
from .spatial import LATENT_DIM


class DivergenceError(RuntimeError):
    """Training loss became non-finite."""


class KeyQueue:
    """Fixed-capacity FIFO of unit-norm key embeddings.

    Oldest entries are evicted first; `as_matrix` returns the live
    entries oldest-to-newest. With `strict` enqueueing a key whose norm
    is off by more than `norm_tol` raises; otherwise it is renormalized.
    """

    def __init__(self, capacity: int, dim: int = LATENT_DIM, dtype=np.float32,
                 strict: bool = True, norm_tol: float = 1e-6):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = int(capacity)
        self.dim = int(dim)
        self.strict = strict
        self.norm_tol = norm_tol
        self._buffer = np.zeros((self.capacity, self.dim), dtype=dtype)
        self._ids = np.full(self.capacity, -1, dtype=np.int64)
        self._total = 0  # keys ever enqueued

    @property
    def fill(self) -> int:
        return min(self._total, self.capacity)

    def enqueue(self, keys: np.ndarray, ids=None) -> None:
        """Append keys oldest-first; optional per-key instance ids let a
        trainer exclude a query's own stale keys from its negatives."""
        keys = np.asarray(keys, dtype=self._buffer.dtype)
        if keys.ndim == 1:
            keys = keys[None]
        if keys.shape[1] != self.dim:
            raise ValueError(f"key dim {keys.shape[1]} != queue dim {self.dim}")
        if ids is None:
            ids = np.full(len(keys), -1, dtype=np.int64)
        else:
            ids = np.asarray(ids, dtype=np.int64)
            if len(ids) != len(keys):
                raise ValueError("ids misaligned with keys")
        norms = np.linalg.norm(keys, axis=1)
        off = np.abs(norms - 1.0) > self.norm_tol
        if np.any(off):
            if self.strict:
                raise ValueError(
                    f"{int(off.sum())} keys are not unit-norm (worst |norm-1| = "
                    f"{float(np.abs(norms - 1.0).max()):.3g})"
                )
            keys = keys / norms[:, None]
        # oversized batches: entries beyond capacity are already evicted,
        # so only the newest tail is written (at its logical slots)
        kept = keys[-self.capacity:] if len(keys) > self.capacity else keys
        skipped = len(keys) - len(kept)
        pos = (self._total + skipped + np.arange(len(kept))) % self.capacity
        self._buffer[pos] = kept
        self._ids[pos] = ids[skipped:]
        self._total += len(keys)

    def _order(self) -> np.ndarray:
        if self._total <= self.capacity:
            return np.arange(self._total)
        ptr = self._total % self.capacity
        return np.concatenate([np.arange(ptr, self.capacity), np.arange(ptr)])

    def as_matrix(self) -> np.ndarray:
        """(fill, dim) copy, oldest first."""
        return self._buffer[self._order()].copy()

    def ids(self) -> np.ndarray:
        """(fill,) instance ids aligned with `as_matrix` rows."""
        return self._ids[self._order()].copy()


def enqueue_batch(queue: KeyQueue, keys: np.ndarray) -> KeyQueue:
    queue.enqueue(keys)
    return queue


def cosine_similarity(z_i, z_j) -> float:
    """dot(z_i, z_j) / (|z_i| |z_j|); undefined for zero vectors."""
    a = np.asarray(z_i, dtype=np.float64).ravel()
    b = np.asarray(z_j, dtype=np.float64).ravel()
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine similarity is undefined for zero vectors")
    return float(a @ b / (na * nb))


def _l2_normalize(x: torch.Tensor, dim: int = -1) -> torch.Tensor:
    return x / x.norm(dim=dim, keepdim=True)


def info_nce_loss(z_q, z_pos, queue, tau: float):
    """Temperature-scaled contrastive loss of one query against its
    positive key and the queued negatives.

    Computed relative to the positive logit, so exactly-uniform logits
    give exactly log(K + 1) and large negative gaps cannot overflow.
    Differentiable in z_q when given torch tensors.
    """
    if tau <= 0:
        raise ValueError("temperature must be > 0")
    negatives = queue.as_matrix() if isinstance(queue, KeyQueue) else np.asarray(queue)
    if len(negatives) == 0:
        raise ValueError("need at least one negative key")
    torch_in = isinstance(z_q, torch.Tensor)
    q = z_q if torch_in else torch.as_tensor(np.asarray(z_q, dtype=np.float64))
    pos = z_pos if isinstance(z_pos, torch.Tensor) else torch.as_tensor(
        np.asarray(z_pos, dtype=np.float64)
    )
    negs = torch.as_tensor(negatives, dtype=q.dtype)
    loss = _info_nce(q[None], pos[None], negs, tau)[0]
    return loss if torch_in else float(loss)


def _info_nce(z_q: torch.Tensor, z_pos: torch.Tensor, negatives: torch.Tensor,
              tau: float, exclude: torch.Tensor | None = None) -> torch.Tensor:
    """(B, D) queries / positives vs (K, D) negatives -> (B,) losses.

    `exclude` is an optional (B, K) bool mask of columns to drop from
    the negative sum (a query's own stale keys in the queue).
    """
    q = _l2_normalize(z_q)
    pos = _l2_normalize(z_pos)
    negs = _l2_normalize(negatives)
    sim_pos = (q * pos).sum(dim=-1)                    # (B,)
    sim_neg = q @ negs.T                               # (B, K)
    gaps = (sim_neg - sim_pos[:, None]) / tau
    if exclude is not None:
        gaps = gaps.masked_fill(exclude, -torch.inf)
    shift = torch.clamp(gaps.max(dim=1).values, min=0.0)
    return shift + torch.log(
        torch.exp(-shift) + torch.exp(gaps - shift[:, None]).sum(dim=1)
    )


@dataclass
class EncoderPair:
    """Query/key parameter sets linked by the momentum rule.

    Key parameters are updated only by `momentum_update`, never by
    gradients; query parameters only by the optimizer.
    """

    query: torch.nn.Module
    key: torch.nn.Module
    momentum: float = 0.999

    def __post_init__(self):
        if not 0.0 <= self.momentum <= 1.0:
            raise ValueError("momentum must lie in [0, 1]")
        for param in self.key.parameters():
            param.requires_grad_(False)

    @classmethod
    def from_query(cls, query: torch.nn.Module, momentum: float = 0.999) -> "EncoderPair":
        return cls(query=query, key=copy.deepcopy(query), momentum=momentum)


def momentum_update(pair: EncoderPair) -> None:
    """xi <- m * xi + (1 - m) * theta, elementwise on every tensor.

    Written as three separate rounded ops (two scalings, one add) so
    the result matches a scalar reference implementation bit for bit.
    """
    m = pair.momentum
    with torch.no_grad():
        q_params = list(pair.query.parameters())
        k_params = list(pair.key.parameters())
        if len(q_params) != len(k_params):
            raise ValueError("query/key parameter lists differ in length")
        for theta, xi in zip(q_params, k_params):
            if theta.shape != xi.shape:
                raise ValueError(f"shape mismatch {tuple(theta.shape)} vs {tuple(xi.shape)}")
            xi.copy_(m * xi + (1.0 - m) * theta)


@dataclass(frozen=True)
class TrainConfig:
    """Pretext-training hyperparameters (desk-scale defaults)."""

    loss_temperature: float = 0.07
    learning_rate: float = 0.01
    weight_decay: float = 1e-4
    nesterov_momentum: float = 0.9
    batch_size: int = 32
    epochs: int = 30
    key_momentum: float = 0.999
    queue_size: int = 512
    seed: int = 0
    dtype: str = "float32"
    early_stop: bool = False
    plateau_rel_change: float = 1e-3
    plateau_window: int = 5

    def __post_init__(self):
        if self.loss_temperature <= 0 or self.learning_rate <= 0:
            raise ValueError("temperature and learning rate must be positive")
        if self.batch_size < 1 or self.epochs < 1 or self.queue_size < 1:
            raise ValueError("batch_size, epochs, and queue_size must be >= 1")
        if self.dtype not in ("float32", "float64"):
            raise ValueError("dtype must be float32 or float64")


@dataclass
class PretrainResult:
    pair: EncoderPair
    queue: KeyQueue
    epoch_losses: list = field(default_factory=list)
    stopped_early: bool = False

    @property
    def query(self) -> torch.nn.Module:
        return self.pair.query


class _QueryModel(torch.nn.Module):
    """Encoder + projection head treated as one parameter set, so the
    momentum rule covers both (the head is part of the pretext model)."""

    def __init__(self, encoder: torch.nn.Module, head: torch.nn.Module):
        super().__init__()
        self.encoder = encoder
        self.head = head

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.head(self.encoder(x))


def pretrain(
    samples: list[LabeledSample],
    build_model,
    policy: AugmentationPolicy,
    cfg: TrainConfig,
    aug_cfg: AugmentationConfig | None = None,
    progress=None,
) -> PretrainResult:
    """Momentum-contrastive pretraining over a labeled (labels unused)
    sample list.

    `build_model(rng)` must return an (encoder, head) pair built at
    float64; it is converted to cfg.dtype here. Per batch: draw a
    positive pair per sample, push the query view through the query
    model, the key view through the key model without gradient, score
    the query against its key and the queue, step the optimizer on the
    query parameters only, apply the momentum rule, enqueue the keys.
    """
    if not samples:
        raise ValueError("dataset is empty")
    aug_cfg = aug_cfg or AugmentationConfig()
    dtype = torch.float32 if cfg.dtype == "float32" else torch.float64

    root = RandomStream(cfg.seed)
    init_rng = root.child(1)
    aug_rng = root.child(2)
    shuffle_rng = root.child(3)

    encoder, head = build_model(init_rng)
    query = _QueryModel(encoder, head).to(dtype)
    pair = EncoderPair.from_query(query, momentum=cfg.key_momentum)
    optimizer = torch.optim.SGD(
        pair.query.parameters(),
        lr=cfg.learning_rate,
        momentum=cfg.nesterov_momentum,
        nesterov=True,
        weight_decay=cfg.weight_decay,
    )
    queue = KeyQueue(cfg.queue_size, dim=LATENT_DIM,
                     dtype=np.float32 if dtype == torch.float32 else np.float64)

    def views_tensor(views):
        return torch.as_tensor(np.stack([v.frames for v in views]), dtype=dtype)

    # Warm the queue with one pass of key-encoder outputs so the first
    # real batch already sees negatives.
    order0 = np.arange(len(samples))
    with torch.no_grad():
        for start in range(0, len(samples), cfg.batch_size):
            idx = order0[start : start + cfg.batch_size]
            batch = [samples[i] for i in idx]
            views = [
                sample_positive_pair(s.sequence, policy, aug_cfg, aug_rng)[1] for s in batch
            ]
            keys = _l2_normalize(pair.key(views_tensor(views)))
            queue.enqueue(keys.numpy(), ids=idx)
            if queue.fill >= queue.capacity:
                break

    epoch_losses: list[float] = []
    stopped_early = False
    for epoch in range(cfg.epochs):
        order = shuffle_rng.permutation(len(samples))
        losses = []
        for start in range(0, len(order), cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            batch = [samples[i] for i in idx]
            pairs = [sample_positive_pair(s.sequence, policy, aug_cfg, aug_rng) for s in batch]
            q_in = views_tensor([p[0] for p in pairs])
            k_in = views_tensor([p[1] for p in pairs])

            z_q = _l2_normalize(pair.query(q_in))
            with torch.no_grad():
                z_k = _l2_normalize(pair.key(k_in))
            negatives = torch.as_tensor(queue.as_matrix(), dtype=dtype)
            # the dictionary only supplies OTHER instances' keys: drop the
            # query's own stale entries (at this scale every query would
            # otherwise meet its previous-epoch key as a false negative)
            exclude = torch.as_tensor(queue.ids()[None, :] == idx[:, None])
            loss = _info_nce(z_q, z_k, negatives, cfg.loss_temperature, exclude).mean()
            if not torch.isfinite(loss):
                raise DivergenceError(
                    f"non-finite loss at epoch {epoch} (last finite epochs: {epoch_losses[-3:]})"
                )
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            momentum_update(pair)
            queue.enqueue(z_k.numpy(), ids=idx)
            losses.append(float(loss.detach()))
        epoch_losses.append(float(np.mean(losses)))
        if progress is not None:
            progress(epoch, epoch_losses[-1])
        if cfg.early_stop and len(epoch_losses) > cfg.plateau_window:
            prev = epoch_losses[-cfg.plateau_window - 1]
            if prev > 0 and abs(prev - epoch_losses[-1]) / prev < cfg.plateau_rel_change:
                stopped_early = True
                break
    return PretrainResult(pair=pair, queue=queue, epoch_losses=epoch_losses,
                          stopped_early=stopped_early)


def uniform_logit_loss(fill: int) -> float:
    """Loss value under exactly-uniform logits with `fill` negatives."""
    return math.log(fill + 1)
