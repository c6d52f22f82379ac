"""Micro-gesture augmentation suite and positive-pair sampling.

Six gesture-aware transforms (coordinate/view perturbation, repeat,
reverse, posterize time, stretch) plus the attack-style baselines used
for comparison. Every transform preserves the T x N x 3 shape, keeps
values finite, and is bit-deterministic given (seed, config).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .rng import RandomStream
from .sequence import SkeletonSequence, resample_indices

_EPS = 1e-6  # denominator guard for the perturbation coefficient


class AugmentationKind(enum.Enum):
    COORDINATE_PERTURBATION = "coordinate_perturbation"
    VIEW_PERTURBATION = "view_perturbation"
    REPEAT_CLIP = "repeat_clip"
    REVERSE_CLIP = "reverse_clip"
    POSTERIZE_TIME = "posterize_time"
    STRETCH = "stretch"
    BASELINE_COORDINATE_ATTACK = "baseline_coordinate_attack"
    BASELINE_VIEWPOINT_ATTACK = "baseline_viewpoint_attack"
    BASELINE_DROP_NODE = "baseline_drop_node"
    BASELINE_DROP_FRAMES = "baseline_drop_frames"
    BASELINE_SYMMETRY = "baseline_symmetry"
    IDENTITY = "identity"


BASELINE_KINDS = frozenset(
    {
        AugmentationKind.BASELINE_COORDINATE_ATTACK,
        AugmentationKind.BASELINE_VIEWPOINT_ATTACK,
        AugmentationKind.BASELINE_DROP_NODE,
        AugmentationKind.BASELINE_DROP_FRAMES,
        AugmentationKind.BASELINE_SYMMETRY,
    }
)


@dataclass(frozen=True)
class AugmentationConfig:
    """Draw ranges for every transform.

    The perturbation temperature is unrelated to the contrastive-loss
    temperature; they just share a symbol upstream. Repeat bounds must
    satisfy repeat_L0 + repeat_Lhigh < T for every sequence this config
    is applied to. Ranges with value None are resolved per sequence
    length by `resolve_for_length`.
    """

    perturb_temperature: float = 1.0
    perturbed_joint_count: int | None = None  # default: max(1, ceil(0.3 * N))
    lambda_clamp: float = 1.0
    view_major_range: float = math.pi / 4
    view_minor_range: float = math.pi / 6
    repeat_L0: int | None = None              # default: floor(T / 4)
    repeat_Llow: int | None = None            # default: floor(T / 8)
    repeat_Lhigh: int | None = None           # default: floor(T / 2) - 1
    reverse_Lv_range: tuple | None = None     # default: (floor(T/8), floor(T/2))
    posterize_anchor: int | None = None       # default: ceil(T / 8)
    posterize_segments: int = 3
    posterize_rate_range: tuple = (0.5, 2.0)
    stretch_shape_range: tuple = (1.0, 2.0)
    stretch_tilt_range: tuple = (-1.0, 1.0)

    def __post_init__(self):
        if self.perturb_temperature <= 0:
            raise ValueError("perturb_temperature must be > 0")
        if self.lambda_clamp <= 0:
            raise ValueError("lambda_clamp must be > 0")
        if self.posterize_segments < 1:
            raise ValueError("posterize_segments must be >= 1")
        for name in ("posterize_rate_range", "stretch_shape_range", "stretch_tilt_range"):
            lo, hi = getattr(self, name)
            if hi < lo:
                raise ValueError(f"{name} is empty: ({lo}, {hi})")

    def resolve_for_length(self, t: int, n: int) -> "AugmentationConfig":
        """Fill length-dependent defaults for a T-frame, N-joint sequence."""
        resolved = replace(
            self,
            perturbed_joint_count=(
                self.perturbed_joint_count
                if self.perturbed_joint_count is not None
                else max(1, math.ceil(0.3 * n))
            ),
            repeat_L0=self.repeat_L0 if self.repeat_L0 is not None else t // 4,
            repeat_Llow=self.repeat_Llow if self.repeat_Llow is not None else t // 8,
            repeat_Lhigh=self.repeat_Lhigh if self.repeat_Lhigh is not None else t // 2 - 1,
            reverse_Lv_range=(
                self.reverse_Lv_range
                if self.reverse_Lv_range is not None
                else (max(1, t // 8), max(1, t // 2))
            ),
            posterize_anchor=(
                self.posterize_anchor if self.posterize_anchor is not None else math.ceil(t / 8)
            ),
        )
        if resolved.perturbed_joint_count > n:
            raise ValueError(
                f"perturbed_joint_count={resolved.perturbed_joint_count} exceeds joint count {n}"
            )
        if resolved.repeat_L0 + resolved.repeat_Lhigh >= t:
            raise ValueError(
                f"repeat bounds violate L0 + Lhigh < T: "
                f"{resolved.repeat_L0} + {resolved.repeat_Lhigh} >= {t}"
            )
        if resolved.repeat_Llow > resolved.repeat_Lhigh:
            raise ValueError("repeat clip-length interval is empty")
        lo, hi = resolved.reverse_Lv_range
        if not (1 <= lo <= hi <= t):
            raise ValueError(f"reverse_Lv_range ({lo}, {hi}) invalid for T={t}")
        return resolved


def coordinate_perturbation(
    seq: SkeletonSequence, cfg: AugmentationConfig, rng: RandomStream
) -> SkeletonSequence:
    """Shift a few random joints by a motion-derived offset.

    Per selected joint, the per-axis coefficient is
    (1/temperature) * (final - middle) / (middle - start) over the
    first, middle, and last frames, guarded against tiny denominators
    and clamped to +-lambda_clamp. One uniform [-1, 1]^3 perturbation
    row per joint is scaled by the coefficient and added to that joint
    in every frame.
    """
    t = seq.num_frames
    if t < 3:
        raise ValueError("coordinate perturbation needs at least 3 frames")
    cfg = cfg.resolve_for_length(t, seq.num_joints)
    frames = seq.frames.copy()
    # snapshot the anchor frames: the loop below mutates `frames`
    start, middle, final = frames[0].copy(), frames[t // 2].copy(), frames[t - 1].copy()

    joints = np.sort(rng.choice(seq.num_joints, size=cfg.perturbed_joint_count))
    for joint in joints:
        num = final[joint] - middle[joint]
        den = middle[joint] - start[joint]
        den = np.where(np.abs(den) < _EPS, np.where(den < 0, -_EPS, _EPS), den)
        lam = num / den / cfg.perturb_temperature
        lam = np.clip(lam, -cfg.lambda_clamp, cfg.lambda_clamp)
        r = rng.uniform(-1.0, 1.0, size=3)
        frames[:, joint, :] += lam * r
    return seq.with_frames(frames)


def _rotation_x(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[1, 0, 0], [0, c, s], [0, -s, c]], dtype=np.float64)


def _rotation_y(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, 0, -s], [0, 1, 0], [s, 0, c]], dtype=np.float64)


def _rotation_z(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s, 0], [-s, c, 0], [0, 0, 1]], dtype=np.float64)


def rotation_matrix(theta_x: float, theta_y: float, theta_z: float) -> np.ndarray:
    """Composite right-handed rotation R_X . R_Y . R_Z for row vectors."""
    return _rotation_x(theta_x) @ _rotation_y(theta_y) @ _rotation_z(theta_z)


def view_perturbation(
    seq: SkeletonSequence, cfg: AugmentationConfig, rng: RandomStream
) -> SkeletonSequence:
    """Rotate the whole sequence to a randomly drawn viewpoint.

    One axis gets the wide angle range, the other two the narrow range;
    the same composite rotation applies to every frame so the gesture
    itself is unchanged.
    """
    major_axis = int(rng.integers(0, 2))
    angles = []
    for axis in range(3):
        bound = cfg.view_major_range if axis == major_axis else cfg.view_minor_range
        angles.append(float(rng.uniform(-bound, bound)))
    rot = rotation_matrix(*angles)
    return seq.with_frames(seq.frames @ rot)


def repeat_clip(
    seq: SkeletonSequence, cfg: AugmentationConfig, rng: RandomStream
) -> SkeletonSequence:
    """Duplicate a random clip in place, then resample back to T frames.

    Start index is drawn from [0, L0], clip length from [Llow, Lhigh];
    the config guarantees L0 + Lhigh < T so the clip always fits.
    """
    t = seq.num_frames
    cfg = cfg.resolve_for_length(t, seq.num_joints)
    start = int(rng.integers(0, cfg.repeat_L0))
    length = int(rng.integers(cfg.repeat_Llow, cfg.repeat_Lhigh))
    if length == 0:
        return seq.with_frames(seq.frames.copy())
    idx = np.concatenate(
        [
            np.arange(start + length),
            np.arange(start, start + length),
            np.arange(start + length, t),
        ]
    )
    extended = seq.frames[idx]
    return seq.with_frames(extended[resample_indices(len(idx), t)])


def reverse_clip(
    seq: SkeletonSequence, cfg: AugmentationConfig, rng: RandomStream
) -> SkeletonSequence:
    """Invert the frame order of one random contiguous clip."""
    t = seq.num_frames
    cfg = cfg.resolve_for_length(t, seq.num_joints)
    lo, hi = cfg.reverse_Lv_range
    length = int(rng.integers(lo, hi))
    start = int(rng.integers(0, t - length))
    frames = seq.frames.copy()
    frames[start : start + length] = frames[start : start + length][::-1]
    return seq.with_frames(frames)


def posterize_time_indices(
    t: int, anchor: int, segment_rates: list[float]
) -> np.ndarray:
    """Source-frame index map for posterize-time (anchors untouched).

    The interior between the two anchor clips is split into
    len(segment_rates) near-equal segments; segment s is resampled at
    rate r_s (output length round(len * r)), the stitched interior is
    resampled back to its original length, and the anchors are copied
    verbatim. The returned map is monotone non-decreasing.
    """
    k = len(segment_rates)
    if t < 2 * anchor + k:
        raise ValueError(f"T={t} too short for anchors {anchor} and {k} segments")
    interior = np.arange(anchor, t - anchor)
    pieces = []
    for segment, rate in zip(np.array_split(interior, k), segment_rates):
        new_len = max(1, int(round(len(segment) * rate)))
        pieces.append(segment[resample_indices(len(segment), new_len)])
    stitched = np.concatenate(pieces)
    interior_out = stitched[resample_indices(len(stitched), len(interior))]
    return np.concatenate([np.arange(anchor), interior_out, np.arange(t - anchor, t)])


def posterize_time(
    seq: SkeletonSequence, cfg: AugmentationConfig, rng: RandomStream
) -> SkeletonSequence:
    """Resample interior segments at random heterogeneous rates.

    The first and last anchor clips are preserved byte-identically; the
    overall length stays T.
    """
    t = seq.num_frames
    cfg = cfg.resolve_for_length(t, seq.num_joints)
    if t < 2 * cfg.posterize_anchor + cfg.posterize_segments:
        raise ValueError(
            f"T={t} too short for posterize anchors {cfg.posterize_anchor} "
            f"and {cfg.posterize_segments} segments"
        )
    lo, hi = cfg.posterize_rate_range
    rates = [float(rng.uniform(lo, hi)) for _ in range(cfg.posterize_segments)]
    idx = posterize_time_indices(t, cfg.posterize_anchor, rates)
    return seq.with_frames(seq.frames[idx])


def stretch(
    seq: SkeletonSequence, cfg: AugmentationConfig, rng: RandomStream
) -> SkeletonSequence:
    """Apply one random body-shape (diagonal) or tilt (shear) matrix.

    Shape scales the three axes independently within the shape range;
    tilt keeps a unit diagonal with random off-diagonal terms. The same
    matrix multiplies every joint row vector in every frame.
    """
    use_shape = rng.uniform() < 0.5
    if use_shape:
        lo, hi = cfg.stretch_shape_range
        mat = np.diag(rng.uniform(lo, hi, size=3))
    else:
        lo, hi = cfg.stretch_tilt_range
        mat = np.eye(3)
        off = rng.uniform(lo, hi, size=6)
        mat[0, 1], mat[0, 2] = off[0], off[1]
        mat[1, 0], mat[1, 2] = off[2], off[3]
        mat[2, 0], mat[2, 1] = off[4], off[5]
    return seq.with_frames(seq.frames @ mat)


def baseline_augment(
    seq: SkeletonSequence, kind: AugmentationKind, rng: RandomStream
) -> SkeletonSequence:
    """Attack-style baselines from earlier action-recognition work."""
    if kind not in BASELINE_KINDS:
        raise ValueError(f"{kind} is not a baseline augmentation")
    frames = seq.frames.copy()
    t, n, _ = frames.shape
    if kind is AugmentationKind.BASELINE_COORDINATE_ATTACK:
        jitter = rng.uniform(-1.0, 1.0, size=(n, 3))
        frames += frames * jitter[None, :, :]
    elif kind is AugmentationKind.BASELINE_VIEWPOINT_ATTACK:
        axis = int(rng.integers(0, 2))
        theta = float(rng.uniform(-math.pi / 4, math.pi / 4))
        rot = [_rotation_x, _rotation_y, _rotation_z][axis](theta)
        frames = frames @ rot
    elif kind is AugmentationKind.BASELINE_DROP_NODE:
        joint = int(rng.integers(0, n - 1))
        frames[:, joint, :] = 0.0
    elif kind is AugmentationKind.BASELINE_DROP_FRAMES:
        count = max(1, t // 4)
        dropped = rng.choice(t, size=count)
        frames[dropped] = 0.0
    elif kind is AugmentationKind.BASELINE_SYMMETRY:
        frames[:, :, 0] *= -1.0
    return seq.with_frames(frames)


def apply_augmentation(
    seq: SkeletonSequence,
    kind: AugmentationKind,
    cfg: AugmentationConfig,
    rng: RandomStream,
) -> SkeletonSequence:
    if kind is AugmentationKind.IDENTITY:
        return seq.with_frames(seq.frames.copy())
    if kind in BASELINE_KINDS:
        return baseline_augment(seq, kind, rng)
    transform = {
        AugmentationKind.COORDINATE_PERTURBATION: coordinate_perturbation,
        AugmentationKind.VIEW_PERTURBATION: view_perturbation,
        AugmentationKind.REPEAT_CLIP: repeat_clip,
        AugmentationKind.REVERSE_CLIP: reverse_clip,
        AugmentationKind.POSTERIZE_TIME: posterize_time,
        AugmentationKind.STRETCH: stretch,
    }[kind]
    return transform(seq, cfg, rng)


@dataclass(frozen=True)
class AugmentationPolicy:
    """Weighted menu of augmentation kinds for positive-pair sampling."""

    kinds: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.kinds) == 0 or len(self.kinds) != len(self.weights):
            raise ValueError("policy needs matching, non-empty kinds and weights")
        if any(w < 0 for w in self.weights) or sum(self.weights) <= 0:
            raise ValueError("policy weights must be non-negative with positive sum")

    @classmethod
    def uniform(cls, kinds) -> "AugmentationPolicy":
        kinds = tuple(kinds)
        return cls(kinds=kinds, weights=tuple(1.0 for _ in kinds))

    @classmethod
    def identity(cls) -> "AugmentationPolicy":
        return cls(kinds=(AugmentationKind.IDENTITY,), weights=(1.0,))

    def draw_kind(self, rng: RandomStream) -> AugmentationKind:
        return self.kinds[rng.weighted_index(self.weights)]


# The combination that worked best for micro-gestures: one perturbation,
# one spatial, one temporal method.
DEFAULT_POLICY = AugmentationPolicy.uniform(
    (
        AugmentationKind.COORDINATE_PERTURBATION,
        AugmentationKind.STRETCH,
        AugmentationKind.POSTERIZE_TIME,
    )
)


def sample_positive_pair(
    seq: SkeletonSequence,
    policy: AugmentationPolicy,
    cfg: AugmentationConfig,
    rng: RandomStream,
) -> tuple:
    """Two independently augmented views of the same sequence."""
    views = []
    for _ in range(2):
        kind = policy.draw_kind(rng)
        views.append(apply_augmentation(seq, kind, cfg, rng))
    return views[0], views[1]
