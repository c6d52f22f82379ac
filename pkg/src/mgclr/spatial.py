"""Graph-form stream: adaptive graph convolution blocks with temporal
convolution, optional axis-attention gates, and a two-layer
reprojection head onto the 128-dimensional contrastive space.

Every learnable tensor is initialized from a RandomStream so a seed
pins the whole model; torch only supplies the deterministic math and
autograd.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from .graph import GraphTopology, partitioned_adjacency
from .rng import RandomStream

LATENT_DIM = 128


@dataclass(frozen=True)
class SpatialEncoderConfig:
    channels: tuple = (3, 16, 16, 32, 64)  # per-block in/out chain
    embed_dim: int = 4                     # C_e of the sample-adaptive graph generator
    temporal_kernel: int = 5
    attention: bool = False
    frames: int = 32                       # needed by the temporal attention gate
    head_hidden: int = 128

    def __post_init__(self):
        if len(self.channels) < 2:
            raise ValueError("need at least one block")
        if self.temporal_kernel % 2 == 0:
            raise ValueError("temporal kernel width must be odd")

    @property
    def encoder_dim(self) -> int:
        return self.channels[-1]


def _as_btnc(x: torch.Tensor) -> tuple[torch.Tensor, int]:
    """Promote (N,C) / (T,N,C) / (B,T,N,C) to (B,T,N,C)."""
    if x.dim() == 2:
        return x[None, None], 2
    if x.dim() == 3:
        return x[None], 3
    if x.dim() == 4:
        return x, 4
    raise ValueError(f"expected 2-4 dims, got {x.dim()}")


class AdaptiveGraphLayer(nn.Module):
    """One spatial graph convolution with a learned global graph B_p, a
    per-sample graph C_p, and a per-layer blend coefficient.

    Output is sum over the three partitions of
    relu(Dinv (B_p + alpha * C_p) Dinv X Theta_p), where Dinv is the
    inverse-sqrt degree of the partition support, fixed at init.
    C_p rows are softmax-normalized similarities of two learned joint
    embeddings of the time-averaged features.
    """

    def __init__(self, in_channels: int, out_channels: int, topology: GraphTopology,
                 embed_dim: int, rng: RandomStream):
        super().__init__()
        self.in_channels = in_channels
        self.out_channels = out_channels
        parts = partitioned_adjacency(topology)  # (3, N, N)
        self.register_buffer("dinv_sqrt", torch.from_numpy(_support_dinv_sqrt(parts)))
        self.global_graph = nn.Parameter(torch.from_numpy(parts.copy()))
        theta_scale = float(np.sqrt(2.0 / (in_channels + out_channels)))
        self.theta = nn.Parameter(
            torch.from_numpy(rng.normal(0.0, theta_scale, size=(3, in_channels, out_channels)))
        )
        embed_scale = float(np.sqrt(1.0 / in_channels))
        self.embed_a = nn.Parameter(
            torch.from_numpy(rng.normal(0.0, embed_scale, size=(3, in_channels, embed_dim)))
        )
        self.embed_b = nn.Parameter(
            torch.from_numpy(rng.normal(0.0, embed_scale, size=(3, in_channels, embed_dim)))
        )
        self.alpha = nn.Parameter(torch.zeros((), dtype=torch.float64))

    def sample_graph(self, x: torch.Tensor) -> torch.Tensor:
        """C_p for each sample: (B, 3, N, N), rows softmax-normalized."""
        pooled = x.mean(dim=1)  # (B, N, C_in), time-averaged
        ea = torch.einsum("bnc,pce->bpne", pooled, self.embed_a)
        eb = torch.einsum("bnc,pce->bpne", pooled, self.embed_b)
        logits = torch.einsum("bpne,bpme->bpnm", ea, eb)
        return torch.softmax(logits, dim=-1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x, in_dim = _as_btnc(x)
        sample_graph = self.sample_graph(x)  # (B, 3, N, N)
        graph = self.global_graph[None] + self.alpha * sample_graph
        graph = self.dinv_sqrt[None, :, :, None] * graph * self.dinv_sqrt[None, :, None, :]
        support = torch.einsum("bpnm,btmc->bptnc", graph, x)
        out = torch.relu(torch.einsum("bptnc,pco->bptno", support, self.theta)).sum(dim=1)
        if in_dim == 2:
            return out[0, 0]
        if in_dim == 3:
            return out[0]
        return out


def _support_dinv_sqrt(parts: np.ndarray) -> np.ndarray:
    """Inverse-sqrt row degrees of each partition's support, 0-guarded."""
    deg = parts.sum(axis=2)  # (3, N)
    out = np.zeros_like(deg)
    nz = deg > 0
    out[nz] = deg[nz] ** -0.5
    return out


class TemporalConvLayer(nn.Module):
    """Same-length 1-D convolution over time, independently at each joint."""

    def __init__(self, in_channels: int, out_channels: int, kernel: int, rng: RandomStream):
        super().__init__()
        if kernel % 2 == 0:
            raise ValueError("temporal kernel width must be odd")
        self.kernel = kernel
        scale = float(np.sqrt(2.0 / (in_channels * kernel + out_channels)))
        self.weight = nn.Parameter(
            torch.from_numpy(rng.normal(0.0, scale, size=(out_channels, in_channels, kernel)))
        )
        self.bias = nn.Parameter(torch.zeros(out_channels, dtype=torch.float64))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x, in_dim = _as_btnc(x)
        conv_in = x.permute(0, 3, 1, 2)  # (B, C, T, N)
        out = nn.functional.conv2d(
            conv_in, self.weight[:, :, :, None], bias=self.bias,
            padding=(self.kernel // 2, 0),
        ).permute(0, 2, 3, 1)
        if in_dim == 2:
            return out[0, 0]
        if in_dim == 3:
            return out[0]
        return out


class AttentionBlock(nn.Module):
    """Sigmoid gates over the joint, frame, and channel axes.

    With `enabled` False the input passes through untouched, so the
    attention-free path is reproduced bitwise.
    """

    def __init__(self, joints: int, frames: int, channels: int, rng: RandomStream,
                 enabled: bool = True):
        super().__init__()
        self.enabled = enabled
        self.gate_joint = _gate_linear(joints, rng)
        self.gate_frame = _gate_linear(frames, rng)
        self.gate_channel = _gate_linear(channels, rng)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if not self.enabled:
            return x
        x, in_dim = _as_btnc(x)
        g_joint = torch.sigmoid(self.gate_joint(x.mean(dim=(1, 3))))      # (B, N)
        g_frame = torch.sigmoid(self.gate_frame(x.mean(dim=(2, 3))))      # (B, T)
        g_channel = torch.sigmoid(self.gate_channel(x.mean(dim=(1, 2))))  # (B, C)
        out = x * g_joint[:, None, :, None] * g_frame[:, :, None, None] * g_channel[:, None, None, :]
        if in_dim == 2:
            return out[0, 0]
        if in_dim == 3:
            return out[0]
        return out


def _gate_linear(size: int, rng: RandomStream) -> nn.Linear:
    layer = nn.Linear(size, size, dtype=torch.float64)
    scale = float(np.sqrt(1.0 / size))
    with torch.no_grad():
        layer.weight.copy_(torch.from_numpy(rng.uniform(-scale, scale, size=(size, size))))
        layer.bias.copy_(torch.from_numpy(rng.uniform(-scale, scale, size=size)))
    return layer


class ReprojectionHead(nn.Module):
    """MLP -> ReLU -> MLP onto the contrastive latent space."""

    def __init__(self, in_dim: int, hidden: int, rng: RandomStream, out_dim: int = LATENT_DIM):
        super().__init__()
        s1 = float(np.sqrt(2.0 / (in_dim + hidden)))
        s2 = float(np.sqrt(2.0 / (hidden + out_dim)))
        self.w1 = nn.Parameter(torch.from_numpy(rng.normal(0.0, s1, size=(in_dim, hidden))))
        self.b1 = nn.Parameter(torch.zeros(hidden, dtype=torch.float64))
        self.w2 = nn.Parameter(torch.from_numpy(rng.normal(0.0, s2, size=(hidden, out_dim))))
        self.b2 = nn.Parameter(torch.zeros(out_dim, dtype=torch.float64))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return torch.relu(x @ self.w1 + self.b1) @ self.w2 + self.b2


class SpatialEncoder(nn.Module):
    """Stacked adaptive-graph blocks with global average pooling.

    Each block is an AdaptiveGraphLayer (rectifier inside) followed by a
    TemporalConvLayer and a rectifier; pooling averages over frames and
    joints to yield the representation used by probes and heads.
    """

    def __init__(self, config: SpatialEncoderConfig, topology: GraphTopology, rng: RandomStream):
        super().__init__()
        self.config = config
        self.topology = topology
        sgc, tgc, attn = [], [], []
        for c_in, c_out in zip(config.channels[:-1], config.channels[1:]):
            sgc.append(AdaptiveGraphLayer(c_in, c_out, topology, config.embed_dim, rng))
            tgc.append(TemporalConvLayer(c_out, c_out, config.temporal_kernel, rng))
            if config.attention:
                attn.append(AttentionBlock(topology.joint_count, config.frames, c_out, rng))
        self.sgc_layers = nn.ModuleList(sgc)
        self.tgc_layers = nn.ModuleList(tgc)
        self.attention_blocks = nn.ModuleList(attn) if config.attention else None

    def features(self, x: torch.Tensor) -> torch.Tensor:
        x, _ = _as_btnc(x)
        if x.shape[2] != self.topology.joint_count:
            raise ValueError(
                f"joint count {x.shape[2]} does not match topology {self.topology.joint_count}"
            )
        for i, (sgc, tgc) in enumerate(zip(self.sgc_layers, self.tgc_layers)):
            x = torch.relu(tgc(sgc(x)))
            if self.attention_blocks is not None:
                x = self.attention_blocks[i](x)
        return x

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """(B, T, N, 3) or (T, N, 3) -> (B, C_enc) pooled embedding."""
        squeeze = x.dim() == 3
        out = self.features(x).mean(dim=(1, 2))
        return out[0] if squeeze else out


def sgc_forward(x_t: torch.Tensor, layer: AdaptiveGraphLayer) -> torch.Tensor:
    """Single-frame (N, C_in) -> (N, C_out) adaptive graph convolution."""
    return layer(x_t)


def tgc_forward(x: torch.Tensor, layer: TemporalConvLayer) -> torch.Tensor:
    """(T, N, C) -> (T, N, C') temporal convolution, length preserved."""
    return layer(x)


def reproject(embedding: torch.Tensor, head: ReprojectionHead) -> torch.Tensor:
    """(C_enc,) or (B, C_enc) -> 128-dim latent; consumers L2-normalize."""
    if embedding.shape[-1] != head.w1.shape[0]:
        raise ValueError(
            f"embedding dim {embedding.shape[-1]} does not match head input {head.w1.shape[0]}"
        )
    return head(embedding)


def build_spatial_model(
    config: SpatialEncoderConfig, topology: GraphTopology, rng: RandomStream
) -> tuple[SpatialEncoder, ReprojectionHead]:
    encoder = SpatialEncoder(config, topology, rng)
    head = ReprojectionHead(config.encoder_dim, config.head_hidden, rng)
    return encoder, head
