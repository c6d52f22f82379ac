"""Deterministic generator of micro-gesture-like labeled skeleton
datasets for desk-scale experiments.

Each category owns a distinct motion program: a small set of active
joints moving along fixed directions, either oscillating (round-trip
gestures) or ramping to a held offset (one-way gestures), on top of a
shared humanoid rest pose. Samples of a category share the program and
differ by nuisances: per-subject body scale, per-sample phase, speed,
shear, and additive coordinate noise. noise_sigma == 0 switches all
sample-level variation off, so every sample equals the category
prototype.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import GraphTopology, default_topology
from .rng import RandomStream
from .sequence import LabeledSample, SkeletonSequence

REST_POSE_15 = np.array(
    [
        (0.00, 0.00, 0.00),   # pelvis (origin in frame 0 by construction)
        (0.00, 0.25, 0.02),   # spine
        (0.00, 0.50, 0.02),   # chest
        (0.00, 0.65, 0.00),   # neck
        (0.00, 0.80, 0.03),   # head
        (0.18, 0.55, 0.00),   # left shoulder
        (0.28, 0.30, 0.05),   # left elbow
        (0.32, 0.05, 0.10),   # left wrist
        (-0.18, 0.55, 0.00),  # right shoulder
        (-0.28, 0.30, 0.05),  # right elbow
        (-0.32, 0.05, 0.10),  # right wrist
        (0.12, -0.25, 0.00),  # left hip
        (0.12, -0.60, 0.02),  # left knee
        (-0.12, -0.25, 0.00), # right hip
        (-0.12, -0.60, 0.02), # right knee
    ],
    dtype=np.float64,
)

OSCILLATION = "oscillation"
RAMP = "ramp"


@dataclass(frozen=True)
class MotionProgram:
    """One category's generating recipe."""

    kind: str                 # OSCILLATION or RAMP
    joints: tuple             # active joint indices
    directions: np.ndarray    # (len(joints), 3) unit direction per joint
    amplitude: float
    frequency: int            # full cycles over the clip; 0 for ramps
    phase: float


@dataclass(frozen=True)
class SynthSpec:
    num_categories: int = 8
    samples_per_category: int = 50
    joints: int = 15
    frames: int = 32
    num_subjects: int = 10
    noise_sigma: float = 0.03
    subject_scale_range: tuple = (0.8, 1.45)  # per-axis body proportions
    amplitude_range: tuple = (0.7, 1.3)       # per-sample gesture intensity
    phase_jitter: float = 0.9
    speed_range: tuple = (0.8, 1.25)
    shear_jitter: float = 0.2
    seed: int = 7

    def __post_init__(self):
        if self.num_categories < 1:
            raise ValueError("need at least one category")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if self.joints != REST_POSE_15.shape[0]:
            raise ValueError("generator currently supports 15-joint skeletons only")
        if self.frames < 8:
            raise ValueError("need at least 8 frames")

    def topology(self) -> GraphTopology:
        return default_topology(self.joints)


def category_programs(spec: SynthSpec) -> list[MotionProgram]:
    """Deterministic, pairwise-distinct motion programs."""
    programs: list[MotionProgram] = []
    seen_prototypes: list[np.ndarray] = []
    for cat in range(spec.num_categories):
        attempt = 0
        while True:
            rng = RandomStream(spec.seed).child(1000 + 31 * cat + attempt)
            kind = OSCILLATION if rng.uniform() < 0.7 else RAMP
            joint_count = 3 + int(rng.integers(0, 2))
            joints = tuple(int(j) for j in np.sort(rng.choice(spec.joints, size=joint_count)))
            directions = rng.normal(0.0, 1.0, size=(joint_count, 3))
            directions /= np.linalg.norm(directions, axis=1, keepdims=True)
            amplitude = float(rng.uniform(0.25, 0.45))
            frequency = int(rng.integers(1, 4)) if kind == OSCILLATION else 0
            phase = float(rng.uniform(0.1 * math.pi, 0.45 * math.pi))
            program = MotionProgram(kind, joints, directions, amplitude, frequency, phase)
            proto = _prototype(program, spec.frames)
            if all(np.abs(proto - p).max() > 1e-6 for p in seen_prototypes):
                programs.append(program)
                seen_prototypes.append(proto)
                break
            attempt += 1
    return programs


def _displacement(program: MotionProgram, t_norm: np.ndarray, speed: float,
                  phase_offset: float) -> np.ndarray:
    """Scalar motion signal per frame, in [-1, 1]."""
    if program.kind == OSCILLATION:
        angle = 2.0 * math.pi * program.frequency * speed * t_norm + program.phase + phase_offset
        return np.sin(angle)
    ramp = np.clip(t_norm * speed, 0.0, 1.0)
    return ramp * ramp * (3.0 - 2.0 * ramp)  # smoothstep hold


def _prototype(program: MotionProgram, frames: int) -> np.ndarray:
    t_norm = np.arange(frames, dtype=np.float64) / frames
    signal = _displacement(program, t_norm, 1.0, 0.0)
    out = np.tile(REST_POSE_15, (frames, 1, 1))
    for idx, joint in enumerate(program.joints):
        out[:, joint, :] += program.amplitude * signal[:, None] * program.directions[idx]
    return out


def generate(spec: SynthSpec) -> list[LabeledSample]:
    """Deterministic labeled dataset; subjects assigned round-robin."""
    programs = category_programs(spec)
    subject_scales = _subject_scales(spec)
    samples: list[LabeledSample] = []
    for cat, program in enumerate(programs):
        for i in range(spec.samples_per_category):
            subject = i % spec.num_subjects
            rng = RandomStream(spec.seed).child(1_000_000 + cat * 10_000 + i)
            frames = _render_sample(spec, program, subject_scales[subject], rng)
            samples.append(
                LabeledSample(
                    sequence=SkeletonSequence(frames=frames),
                    category=cat,
                    subject_id=subject,
                    video_id=f"synth-c{cat:02d}-i{i:03d}",
                    num_categories=spec.num_categories,
                )
            )
    return samples


def _subject_scales(spec: SynthSpec) -> np.ndarray:
    """Per-subject anisotropic body scale, one (3,) vector per subject."""
    lo, hi = spec.subject_scale_range
    rng = RandomStream(spec.seed).child(555)
    return rng.uniform(lo, hi, size=(spec.num_subjects, 3))


def _render_sample(spec: SynthSpec, program: MotionProgram, subject_scale: np.ndarray,
                   rng: RandomStream) -> np.ndarray:
    t_norm = np.arange(spec.frames, dtype=np.float64) / spec.frames
    if spec.noise_sigma == 0.0:
        frames = _prototype(program, spec.frames)
    else:
        phase = float(rng.uniform(-spec.phase_jitter, spec.phase_jitter))
        speed = float(rng.uniform(*spec.speed_range))
        intensity = float(rng.uniform(*spec.amplitude_range))
        signal = _displacement(program, t_norm, speed, phase)
        frames = np.tile(REST_POSE_15, (spec.frames, 1, 1))
        amp = program.amplitude * intensity
        for idx, joint in enumerate(program.joints):
            frames[:, joint, :] += amp * signal[:, None] * program.directions[idx]
        shear = np.eye(3)
        shear[0, 1], shear[0, 2] = rng.uniform(-spec.shear_jitter, spec.shear_jitter, size=2)
        shear[1, 0], shear[2, 0] = rng.uniform(-spec.shear_jitter, spec.shear_jitter, size=2)
        frames = (frames * subject_scale[None, None, :]) @ shear
        frames += rng.normal(0.0, spec.noise_sigma, size=frames.shape)
    # quantize to the on-disk float32 grid so round trips are bit-exact
    return frames.astype(np.float32).astype(np.float64)


def estimate_frequency(sequence: SkeletonSequence, program: MotionProgram) -> int:
    """Zero-crossing frequency estimate of the first active joint's
    displacement along its program direction."""
    joint = program.joints[0]
    direction = program.directions[0]
    rest = REST_POSE_15[joint]
    signal = (sequence.frames[:, joint, :] - rest) @ direction
    signal[np.abs(signal) < 1e-5] = 0.0  # float32 quantization dead zone
    signs = np.sign(signal)
    signs = signs[signs != 0]
    crossings = int(np.sum(signs[1:] != signs[:-1]))
    return int(crossings / 2 + 0.5)
