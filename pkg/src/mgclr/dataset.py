"""Dataset serialization: JSON manifest + flat little-endian float32 payload.

Layout on disk is bit-exact and shared by every tool in the package:

    manifest.json   {version, num_samples, joint_count, coord_dim,
                     entries: [{id, subject, category, T, payload_file,
                     offset}, ...]}
    <payload file>  raw float32 little-endian frames, T-major,
                    joint-next, coordinate-last (C order of (T, N, 3))

`offset` is a byte offset into the payload file. The manifest may also
carry `num_categories` and `frame_rate`; loaders tolerate their absence.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .sequence import COORD_DIM, LabeledSample, SkeletonSequence

FORMAT_VERSION = 1
_PAYLOAD_DTYPE = np.dtype("<f4")


class DatasetFormatError(ValueError):
    """Manifest or payload violates the dataset file format."""


def write_dataset(samples: list[LabeledSample], manifest_path, payload_name: str = None) -> None:
    """Write samples in manifest order; float64 frames quantize to float32."""
    manifest_path = Path(manifest_path)
    if payload_name is None:
        payload_name = manifest_path.stem + ".bin"
    payload_path = manifest_path.parent / payload_name
    manifest_path.parent.mkdir(parents=True, exist_ok=True)

    joint_count = samples[0].sequence.num_joints if samples else 0
    num_categories = 0
    frame_rate = samples[0].sequence.frame_rate if samples else 25.0
    entries = []
    offset = 0
    with open(payload_path, "wb") as payload:
        for sample in samples:
            seq = sample.sequence
            if seq.num_joints != joint_count:
                raise DatasetFormatError(
                    f"sample {sample.video_id}: joint count {seq.num_joints} != {joint_count}"
                )
            raw = np.ascontiguousarray(seq.frames, dtype=_PAYLOAD_DTYPE)
            payload.write(raw.tobytes())
            entries.append(
                {
                    "id": sample.video_id,
                    "subject": sample.subject_id,
                    "category": sample.category,
                    "T": seq.num_frames,
                    "payload_file": payload_name,
                    "offset": offset,
                }
            )
            offset += raw.nbytes
            num_categories = max(num_categories, sample.category + 1)

    manifest = {
        "version": FORMAT_VERSION,
        "num_samples": len(samples),
        "joint_count": joint_count,
        "coord_dim": COORD_DIM,
        "num_categories": num_categories,
        "frame_rate": frame_rate,
        "entries": entries,
    }
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")


def load_dataset(manifest_path) -> list[LabeledSample]:
    """Load every sample in manifest order.

    Raises DatasetFormatError on missing files, header/payload shape
    mismatch, or non-finite coordinate values; the error names the
    offending entry.
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise DatasetFormatError(f"manifest not found: {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"manifest is not valid JSON: {manifest_path}: {exc}") from exc

    for key in ("version", "num_samples", "joint_count", "coord_dim", "entries"):
        if key not in manifest:
            raise DatasetFormatError(f"manifest missing required key '{key}'")
    joint_count = int(manifest["joint_count"])
    coord_dim = int(manifest["coord_dim"])
    if coord_dim != COORD_DIM:
        raise DatasetFormatError(f"coord_dim must be {COORD_DIM}, got {coord_dim}")
    entries = manifest["entries"]
    if len(entries) != int(manifest["num_samples"]):
        raise DatasetFormatError(
            f"num_samples={manifest['num_samples']} but {len(entries)} entries listed"
        )
    num_categories = manifest.get("num_categories")
    frame_rate = float(manifest.get("frame_rate", 25.0))

    payload_cache: dict[str, bytes] = {}
    samples = []
    for entry in entries:
        payload_file = entry["payload_file"]
        if payload_file not in payload_cache:
            payload_path = manifest_path.parent / payload_file
            if not payload_path.is_file():
                raise DatasetFormatError(f"payload file not found: {payload_path}")
            payload_cache[payload_file] = payload_path.read_bytes()
        blob = payload_cache[payload_file]

        t = int(entry["T"])
        offset = int(entry["offset"])
        nbytes = t * joint_count * coord_dim * _PAYLOAD_DTYPE.itemsize
        if offset + nbytes > len(blob):
            raise DatasetFormatError(
                f"entry '{entry['id']}': header declares T={t}, N={joint_count} "
                f"({nbytes} bytes at offset {offset}) but payload holds {len(blob)} bytes"
            )
        frames = np.frombuffer(blob, dtype=_PAYLOAD_DTYPE, count=t * joint_count * coord_dim,
                               offset=offset).reshape(t, joint_count, coord_dim)
        if not np.all(np.isfinite(frames)):
            raise DatasetFormatError(f"entry '{entry['id']}': payload contains non-finite values")
        samples.append(
            LabeledSample(
                sequence=SkeletonSequence(frames=frames.astype(np.float64), frame_rate=frame_rate),
                category=int(entry["category"]),
                subject_id=int(entry["subject"]),
                video_id=str(entry["id"]),
                num_categories=int(num_categories) if num_categories else None,
            )
        )
    return samples


def num_categories_of(samples: list[LabeledSample]) -> int:
    """Declared category count, falling back to max label + 1."""
    declared = {s.num_categories for s in samples if s.num_categories is not None}
    if declared:
        return max(declared)
    return max(s.category for s in samples) + 1


def annotation_reliability(agreed_count: int, total_annotated: int) -> float:
    """Inter-labeler agreement ratio: 2 * agreed / total annotated.

    `total_annotated` counts annotations by both labelers together, so
    full agreement (every instance labeled twice, always matching)
    yields 1.0. The reference corpus this mirrors reports a dataset
    average of 0.81.
    """
    if total_annotated <= 0:
        raise ValueError("total_annotated must be positive")
    if agreed_count < 0 or 2 * agreed_count > total_annotated:
        raise ValueError("agreed_count must satisfy 0 <= 2 * agreed <= total")
    return 2.0 * agreed_count / total_annotated
