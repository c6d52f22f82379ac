"""Sequence-form stream: stacked bidirectional gated recurrent layers
over per-frame flattened joint vectors, mean-pooled over time, with an
affine projection head onto the contrastive space."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from .rng import RandomStream
from .spatial import LATENT_DIM


@dataclass(frozen=True)
class TemporalEncoderConfig:
    input_dim: int          # N * 3
    hidden_units: int = 64  # per direction; full-scale setting is 1024
    layers: int = 3

    def __post_init__(self):
        if self.layers < 1 or self.hidden_units < 1 or self.input_dim < 1:
            raise ValueError("layers, hidden_units, and input_dim must be >= 1")

    @property
    def encoder_dim(self) -> int:
        return 2 * self.hidden_units


class TemporalEncoder(nn.Module):
    """Bidirectional GRU stack; embedding = time-mean of the
    concatenated direction states of the last layer."""

    def __init__(self, config: TemporalEncoderConfig, rng: RandomStream):
        super().__init__()
        self.config = config
        self.gru = nn.GRU(
            input_size=config.input_dim,
            hidden_size=config.hidden_units,
            num_layers=config.layers,
            bidirectional=True,
            batch_first=True,
            dtype=torch.float64,
        )
        # half the usual 1/sqrt(H) range: keeps the recurrence contractive
        # enough that constant inputs of different lengths embed nearby
        scale = float(0.5 / np.sqrt(config.hidden_units))
        with torch.no_grad():
            for name, param in sorted(self.gru.named_parameters()):
                param.copy_(torch.from_numpy(rng.uniform(-scale, scale, size=tuple(param.shape))))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """(B, T, N*3) or (B, T, N, 3) -> (B, 2 * hidden) embedding."""
        squeeze = False
        if x.dim() == 4:
            x = x.reshape(x.shape[0], x.shape[1], -1)
        elif x.dim() == 3 and x.shape[-1] == 3 and x.shape[-2] * 3 == self.config.input_dim:
            x = x.reshape(1, x.shape[0], -1)
            squeeze = True
        elif x.dim() == 2:
            x = x[None]
            squeeze = True
        if x.shape[-1] != self.config.input_dim:
            raise ValueError(
                f"input dim {x.shape[-1]} does not match configured {self.config.input_dim}"
            )
        states, _ = self.gru(x)
        out = states.mean(dim=1)
        return out[0] if squeeze else out


class SequenceProjectionHead(nn.Module):
    """Affine map from the recurrent embedding to the 128-dim latent;
    weights are learned alongside the encoder during the pretext task."""

    def __init__(self, in_dim: int, rng: RandomStream, out_dim: int = LATENT_DIM):
        super().__init__()
        scale = float(np.sqrt(1.0 / in_dim))
        self.weight = nn.Parameter(
            torch.from_numpy(rng.uniform(-scale, scale, size=(in_dim, out_dim)))
        )
        self.bias = nn.Parameter(torch.zeros(out_dim, dtype=torch.float64))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.shape[-1] != self.weight.shape[0]:
            raise ValueError(
                f"embedding dim {x.shape[-1]} does not match head input {self.weight.shape[0]}"
            )
        return x @ self.weight + self.bias


def encode_temporal(x: torch.Tensor, encoder: TemporalEncoder) -> torch.Tensor:
    return encoder(x)


def project_temporal(embedding: torch.Tensor, head: SequenceProjectionHead) -> torch.Tensor:
    return head(embedding)


def build_temporal_model(
    config: TemporalEncoderConfig, rng: RandomStream
) -> tuple[TemporalEncoder, SequenceProjectionHead]:
    encoder = TemporalEncoder(config, rng)
    head = SequenceProjectionHead(config.encoder_dim, rng)
    return encoder, head


def gru_cell_reference(x_t: np.ndarray, h_prev: np.ndarray, w_ih: np.ndarray,
                       w_hh: np.ndarray, b_ih: np.ndarray, b_hh: np.ndarray) -> np.ndarray:
    """One standard update/reset-gate recurrence step (numpy reference).

    Weight layout matches torch: rows stacked [reset; update; new].
    Kept here so oracle tests and gradient checks share one definition.
    """
    h = len(h_prev)
    gi = w_ih @ x_t + b_ih
    gh = w_hh @ h_prev + b_hh
    reset = _sigmoid(gi[:h] + gh[:h])
    update = _sigmoid(gi[h : 2 * h] + gh[h : 2 * h])
    new = np.tanh(gi[2 * h :] + reset * gh[2 * h :])
    return (1.0 - update) * new + update * h_prev


def _sigmoid(v: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-v))
