"""Skeleton sequence data model and frame resampling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

COORD_DIM = 3


@dataclass(frozen=True)
class SkeletonSequence:
    """A T x N x 3 joint-coordinate tensor plus frame-rate metadata.

    Coordinates live in a normalized, unitless space (sequences are
    stored pre-normalized; any centering/scaling happens at ingestion).
    Frames are float64 in memory; the on-disk dataset format quantizes
    to little-endian float32, so canonical sources only ever hold
    float32-representable values.
    """

    frames: np.ndarray
    frame_rate: float = 25.0

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim != 3:
            raise ValueError(f"frames must be T x N x C, got shape {frames.shape}")
        t, n, c = frames.shape
        if t < 2:
            raise ValueError(f"need at least 2 frames, got {t}")
        if n < 1:
            raise ValueError("need at least 1 joint")
        if c != COORD_DIM:
            raise ValueError(f"coordinate dim must be {COORD_DIM}, got {c}")
        if not np.all(np.isfinite(frames)):
            raise ValueError("frames contain non-finite values")
        frames.setflags(write=False)
        object.__setattr__(self, "frames", frames)

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def num_joints(self) -> int:
        return self.frames.shape[1]

    def with_frames(self, frames: np.ndarray) -> "SkeletonSequence":
        return SkeletonSequence(frames=frames, frame_rate=self.frame_rate)


@dataclass(frozen=True)
class LabeledSample:
    """A sequence with its category, subject and source-video identity."""

    sequence: SkeletonSequence
    category: int
    subject_id: int
    video_id: str
    num_categories: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.category < 0:
            raise ValueError(f"category must be non-negative, got {self.category}")
        if self.num_categories is not None and self.category >= self.num_categories:
            raise ValueError(
                f"category {self.category} outside declared range [0, {self.num_categories})"
            )
        if self.subject_id < 0:
            raise ValueError("subject_id must be non-negative")


def resample_indices(source_len: int, target_len: int) -> np.ndarray:
    """Nearest-frame (floor) source index for each output position.

    index(t_out) = floor(t_out * source_len / target_len); the map is
    monotone non-decreasing and is the identity when lengths match.
    """
    if target_len < 1:
        raise ValueError("target length must be >= 1")
    t_out = np.arange(target_len, dtype=np.int64)
    return (t_out * source_len) // target_len


def resample_sequence(seq: SkeletonSequence, target_t: int) -> SkeletonSequence:
    """Resample to `target_t` frames by floor-indexed frame copying.

    No interpolation: every output frame is a verbatim input frame, so
    pose validity is preserved and the operation is deterministic.
    """
    if target_t < 2:
        raise ValueError(f"target length must be >= 2, got {target_t}")
    if target_t == seq.num_frames:
        return seq
    idx = resample_indices(seq.num_frames, target_t)
    return seq.with_frames(seq.frames[idx])
