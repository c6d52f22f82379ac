"""Augmentation suite: worked examples from the transform definitions,
linearity/involution properties, and determinism sweeps."""

import math

import numpy as np
import pytest

from mgclr.augment import (
    DEFAULT_POLICY,
    AugmentationConfig,
    AugmentationKind,
    AugmentationPolicy,
    apply_augmentation,
    baseline_augment,
    coordinate_perturbation,
    posterize_time,
    posterize_time_indices,
    repeat_clip,
    reverse_clip,
    rotation_matrix,
    sample_positive_pair,
    stretch,
    view_perturbation,
)
from mgclr.rng import RandomStream
from mgclr.sequence import SkeletonSequence, resample_indices


def make_seq(t=8, n=4, seed=0):
    rng = np.random.default_rng(seed)
    return SkeletonSequence(frames=rng.normal(size=(t, n, 3)))


class FixedDrawStream(RandomStream):
    """RandomStream stub returning scripted draws, for worked examples."""

    def __init__(self, draws):
        super().__init__(0)
        self._draws = list(draws)

    def _next(self):
        self.position += 1
        return self._draws.pop(0)

    def uniform(self, low=0.0, high=1.0, size=None):
        if size is None:
            return self._next()
        return np.array([self._next() for _ in range(int(np.prod(size)))]).reshape(size)

    def integers(self, low, high, size=None):
        assert size is None
        return self._next()

    def choice(self, n, size, replace=False):
        return np.array([self._next() for _ in range(size)])


class TestCoordinatePerturbation:
    def test_stationary_end_phase_is_identity(self):
        # final frame equals middle frame -> zero numerator -> lambda 0
        frames = np.zeros((5, 2, 3))
        frames[0] = 1.0  # start differs so the denominator is sane
        frames[1] = 0.5
        seq = SkeletonSequence(frames=frames)
        out = coordinate_perturbation(seq, AugmentationConfig(), RandomStream(1))
        assert np.array_equal(out.frames, seq.frames)

    def test_zero_perturbation_matrix_is_identity(self):
        seq = make_seq(t=6, n=3)
        rng = FixedDrawStream([0, 1, 2] + [0.0, 0.0, 0.0] * 3)  # joints, then zero R rows
        cfg = AugmentationConfig(perturbed_joint_count=3)
        out = coordinate_perturbation(seq, cfg, rng)
        assert np.array_equal(out.frames, seq.frames)

    def test_worked_scalar_example(self):
        # one joint with coordinates 0 -> 1 -> 2 on every axis: lambda = 1,
        # so the drawn R shifts the joint by R itself in every frame
        frames = np.zeros((3, 1, 3))
        frames[1] = 1.0
        frames[2] = 2.0
        seq = SkeletonSequence(frames=frames)
        rng = FixedDrawStream([0, 0.5, 0.0, 0.0])
        cfg = AugmentationConfig(perturbed_joint_count=1, perturb_temperature=1.0)
        out = coordinate_perturbation(seq, cfg, rng)
        assert np.allclose(out.frames - seq.frames, [[[0.5, 0.0, 0.0]]] * 3, atol=1e-15)

    def test_requires_three_frames(self):
        with pytest.raises(ValueError, match="3 frames"):
            coordinate_perturbation(make_seq(t=2), AugmentationConfig(), RandomStream(0))

    def test_clamp_bounds_shift(self):
        # near-zero denominator with nonzero numerator: clamp kicks in
        frames = np.zeros((3, 1, 3))
        frames[2] = 5.0  # mid == start -> guarded denominator
        seq = SkeletonSequence(frames=frames)
        cfg = AugmentationConfig(perturbed_joint_count=1, lambda_clamp=1.0)
        out = coordinate_perturbation(seq, cfg, RandomStream(3))
        shift = np.abs(out.frames - seq.frames)
        assert shift.max() <= 1.0 + 1e-12  # |lambda| <= 1, |R| <= 1

    def test_clamp_to_zero_approaches_identity(self):
        seq = make_seq(t=8, n=5, seed=2)
        for clamp, bound in ((1e-3, 1e-3), (1e-6, 1e-6)):
            cfg = AugmentationConfig(lambda_clamp=clamp)
            out = coordinate_perturbation(seq, cfg, RandomStream(9))
            assert np.abs(out.frames - seq.frames).max() <= bound + 1e-15


class TestViewPerturbation:
    def test_zero_angles_identity(self):
        assert np.allclose(rotation_matrix(0.0, 0.0, 0.0), np.eye(3), atol=0)

    def test_single_axis_worked_example(self):
        # row vector (0,1,0) under the X-axis matrix at pi/2 lands on (0,0,1)
        point = np.array([0.0, 1.0, 0.0])
        rotated = point @ rotation_matrix(math.pi / 2, 0.0, 0.0)
        assert np.allclose(rotated, [0.0, 0.0, 1.0], atol=1e-15)

    def test_rotations_orthogonal_over_draws(self):
        cfg = AugmentationConfig()
        rng = RandomStream(11)
        seq = make_seq()
        for _ in range(200):
            out = view_perturbation(seq, cfg, rng)
            # recover the matrix from a frame of linearly independent rows
            a = seq.frames[0][:3]
            b = out.frames[0][:3]
            rot = np.linalg.solve(a, b)
            assert np.abs(rot @ rot.T - np.eye(3)).max() <= 1e-9
            assert abs(np.linalg.det(rot) - 1.0) <= 1e-9

    def test_angle_ranges(self):
        # scripted draws: major axis 2 (z), angles at the range edges
        seq = make_seq()
        rng = FixedDrawStream([2, -math.pi / 6, math.pi / 6, math.pi / 4])
        out = view_perturbation(seq, AugmentationConfig(), rng)
        want = seq.frames @ rotation_matrix(-math.pi / 6, math.pi / 6, math.pi / 4)
        assert np.allclose(out.frames, want, atol=1e-12)

    def test_motion_structure_linearity(self):
        seq = make_seq(t=10, n=6, seed=4)
        out = view_perturbation(seq, AugmentationConfig(), RandomStream(5))
        a = seq.frames[0][:3]
        rot = np.linalg.solve(a, out.frames[0][:3])
        motion_in = np.diff(seq.frames, axis=0)
        motion_out = np.diff(out.frames, axis=0)
        assert np.abs(motion_out - motion_in @ rot).max() <= 1e-9


class TestRepeatClip:
    def test_zero_length_clip_identity(self):
        seq = make_seq(t=8)
        cfg = AugmentationConfig(repeat_Llow=0, repeat_Lhigh=0)
        out = repeat_clip(seq, cfg, RandomStream(0))
        assert np.array_equal(out.frames, seq.frames)

    def test_worked_index_example(self):
        # T=8, clip [2,4) doubled: f0 f1 f2 f3 f2 f3 f4..f7, then resample to 8
        seq = make_seq(t=8)
        rng = FixedDrawStream([2, 2])  # L_b=2, L_d=2
        cfg = AugmentationConfig(repeat_L0=2, repeat_Llow=2, repeat_Lhigh=2)
        out = repeat_clip(seq, cfg, rng)
        inter = [0, 1, 2, 3, 2, 3, 4, 5, 6, 7]
        expected = seq.frames[inter][resample_indices(10, 8)]
        assert np.array_equal(out.frames, expected)

    def test_constant_sequence_invariant(self):
        seq = SkeletonSequence(frames=np.ones((8, 2, 3)))
        out = repeat_clip(seq, AugmentationConfig(), RandomStream(2))
        assert np.array_equal(out.frames, seq.frames)

    def test_invalid_config_rejected(self):
        seq = make_seq(t=8)
        cfg = AugmentationConfig(repeat_L0=4, repeat_Lhigh=4, repeat_Llow=0)
        with pytest.raises(ValueError, match="L0"):
            repeat_clip(seq, cfg, RandomStream(0))

    def test_only_input_frames_appear(self):
        seq = make_seq(t=16, n=3, seed=8)
        out = repeat_clip(seq, AugmentationConfig(), RandomStream(7))
        pool = {frame.tobytes() for frame in seq.frames}
        assert all(frame.tobytes() in pool for frame in out.frames)


class TestReverseClip:
    def test_single_frame_reversal_identity(self):
        seq = make_seq()
        cfg = AugmentationConfig(reverse_Lv_range=(1, 1))
        out = reverse_clip(seq, cfg, RandomStream(0))
        assert np.array_equal(out.frames, seq.frames)

    def test_worked_window_example(self):
        # T=8, reverse [2,5): f0 f1 f4 f3 f2 f5 f6 f7
        seq = make_seq(t=8)
        rng = FixedDrawStream([3, 2])  # length 3, start 2
        out = reverse_clip(seq, AugmentationConfig(), rng)
        assert np.array_equal(out.frames, seq.frames[[0, 1, 4, 3, 2, 5, 6, 7]])

    def test_involution(self):
        seq = make_seq(t=12)
        out1 = reverse_clip(seq, AugmentationConfig(), FixedDrawStream([5, 3]))
        out2 = reverse_clip(out1, AugmentationConfig(), FixedDrawStream([5, 3]))
        assert np.array_equal(out2.frames, seq.frames)


class TestPosterizeTime:
    def test_unit_rates_identity(self):
        idx = posterize_time_indices(32, 4, [1.0, 1.0, 1.0])
        assert np.array_equal(idx, np.arange(32))

    def test_anchors_preserved_any_draw(self):
        seq = make_seq(t=32, n=3)
        cfg = AugmentationConfig()
        for s in range(25):
            out = posterize_time(seq, cfg, RandomStream(s))
            anchor = math.ceil(32 / 8)
            assert np.array_equal(out.frames[:anchor], seq.frames[:anchor])
            assert np.array_equal(out.frames[-anchor:], seq.frames[-anchor:])
            assert out.num_frames == 32

    def test_index_map_matches_bruteforce_oracle(self):
        # independent oracle: walk the segment arithmetic with plain ints
        t, anchor, rates = 32, 4, [0.5, 2.0]
        interior = list(range(anchor, t - anchor))
        k = len(rates)
        base, extra = divmod(len(interior), k)
        oracle_pieces = []
        cursor = 0
        for s, rate in enumerate(rates):
            seg_len = base + (1 if s < extra else 0)
            seg = interior[cursor : cursor + seg_len]
            cursor += seg_len
            new_len = max(1, int(round(seg_len * rate)))
            oracle_pieces.extend(seg[(j * seg_len) // new_len] for j in range(new_len))
        out_len = len(interior)
        stitched = [
            oracle_pieces[(j * len(oracle_pieces)) // out_len] for j in range(out_len)
        ]
        oracle = list(range(anchor)) + stitched + list(range(t - anchor, t))
        assert posterize_time_indices(t, anchor, rates).tolist() == oracle

    def test_monotone_index_map(self):
        rng = RandomStream(3)
        for _ in range(50):
            rates = [float(rng.uniform(0.5, 2.0)) for _ in range(3)]
            idx = posterize_time_indices(32, 4, rates)
            assert np.all(np.diff(idx) >= 0)

    def test_too_short_rejected(self):
        seq = make_seq(t=8)
        cfg = AugmentationConfig(posterize_anchor=3, posterize_segments=3)
        with pytest.raises(ValueError, match="too short"):
            posterize_time(seq, cfg, RandomStream(0))


class TestStretch:
    def test_identity_shape(self):
        seq = make_seq()
        rng = FixedDrawStream([0.0, 1.0, 1.0, 1.0])  # shape branch, alpha=beta=gamma=1
        out = stretch(seq, AugmentationConfig(), rng)
        assert np.array_equal(out.frames, seq.frames)

    def test_identity_tilt(self):
        seq = make_seq()
        rng = FixedDrawStream([0.9] + [0.0] * 6)  # tilt branch, all off-diagonals 0
        out = stretch(seq, AugmentationConfig(), rng)
        assert np.array_equal(out.frames, seq.frames)

    def test_worked_shape_example(self):
        frames = np.tile(np.array([1.0, 2.0, 3.0]), (2, 1, 1))
        seq = SkeletonSequence(frames=frames)
        rng = FixedDrawStream([0.0, 2.0, 1.0, 1.0])
        out = stretch(seq, AugmentationConfig(), rng)
        assert np.allclose(out.frames, np.tile([2.0, 2.0, 3.0], (2, 1, 1)), atol=0)

    def test_motion_structure_linearity(self):
        seq = make_seq(t=9, n=5, seed=13)
        out = stretch(seq, AugmentationConfig(), RandomStream(17))
        a = seq.frames[0][:3]
        mat = np.linalg.solve(a, out.frames[0][:3])
        assert np.abs(np.diff(out.frames, axis=0) - np.diff(seq.frames, axis=0) @ mat).max() <= 1e-9


class TestBaselines:
    def test_drop_node_single_joint(self):
        seq = SkeletonSequence(frames=np.ones((4, 1, 3)))
        out = baseline_augment(seq, AugmentationKind.BASELINE_DROP_NODE, RandomStream(0))
        assert np.array_equal(out.frames, np.zeros((4, 1, 3)))

    def test_symmetry_involution(self):
        seq = make_seq()
        once = baseline_augment(seq, AugmentationKind.BASELINE_SYMMETRY, RandomStream(0))
        twice = baseline_augment(once, AugmentationKind.BASELINE_SYMMETRY, RandomStream(0))
        assert np.array_equal(twice.frames, seq.frames)
        assert not np.array_equal(once.frames, seq.frames)

    def test_drop_frames_count(self):
        seq = SkeletonSequence(frames=np.ones((8, 2, 3)))
        out = baseline_augment(seq, AugmentationKind.BASELINE_DROP_FRAMES, RandomStream(1))
        zero_frames = int(np.sum(np.all(out.frames == 0, axis=(1, 2))))
        assert zero_frames == 2  # max(1, 8 // 4)

    def test_viewpoint_attack_single_axis(self):
        seq = make_seq(t=6, n=4, seed=5)
        rng = FixedDrawStream([0, math.pi / 8])  # X axis only
        out = baseline_augment(seq, AugmentationKind.BASELINE_VIEWPOINT_ATTACK, rng)
        assert np.allclose(out.frames[..., 0], seq.frames[..., 0], atol=1e-12)

    def test_non_baseline_kind_rejected(self):
        with pytest.raises(ValueError, match="baseline"):
            baseline_augment(make_seq(), AugmentationKind.STRETCH, RandomStream(0))


class TestShapeAndDeterminism:
    ALL_KINDS = list(AugmentationKind)

    @pytest.mark.parametrize("kind", ALL_KINDS, ids=lambda k: k.value)
    def test_shape_and_finiteness(self, kind):
        seq = make_seq(t=16, n=15, seed=21)
        out = apply_augmentation(seq, kind, AugmentationConfig(), RandomStream(3))
        assert out.frames.shape == seq.frames.shape
        assert np.all(np.isfinite(out.frames))

    @pytest.mark.parametrize("kind", ALL_KINDS, ids=lambda k: k.value)
    def test_bit_determinism(self, kind):
        seq = make_seq(t=16, n=15, seed=22)
        cfg = AugmentationConfig()
        a = apply_augmentation(seq, kind, cfg, RandomStream(99))
        b = apply_augmentation(seq, kind, cfg, RandomStream(99))
        assert np.array_equal(a.frames, b.frames)


class TestPositivePairs:
    def test_identity_policy(self):
        seq = make_seq()
        v1, v2 = sample_positive_pair(
            seq, AugmentationPolicy.identity(), AugmentationConfig(), RandomStream(0)
        )
        assert np.array_equal(v1.frames, seq.frames)
        assert np.array_equal(v2.frames, seq.frames)

    def test_same_seed_same_pair(self):
        seq = make_seq(t=32, n=15)
        cfg = AugmentationConfig()
        p1 = sample_positive_pair(seq, DEFAULT_POLICY, cfg, RandomStream(5))
        p2 = sample_positive_pair(seq, DEFAULT_POLICY, cfg, RandomStream(5))
        assert np.array_equal(p1[0].frames, p2[0].frames)
        assert np.array_equal(p1[1].frames, p2[1].frames)

    def test_neighboring_seeds_differ(self):
        seq = make_seq(t=32, n=15, seed=30)
        cfg = AugmentationConfig()
        for seed in range(100):
            a = sample_positive_pair(seq, DEFAULT_POLICY, cfg, RandomStream(seed))
            b = sample_positive_pair(seq, DEFAULT_POLICY, cfg, RandomStream(seed + 1))
            assert not (
                np.array_equal(a[0].frames, b[0].frames)
                and np.array_equal(a[1].frames, b[1].frames)
            )

    def test_empty_policy_rejected(self):
        with pytest.raises(ValueError):
            AugmentationPolicy(kinds=(), weights=())
