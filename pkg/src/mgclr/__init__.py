"""Dual-stream momentum-contrastive representation learning for
skeleton micro-gestures, with score-fusion linear evaluation and an
LLM-based masked-dialogue emotion-inference harness."""

from .rng import RandomStream
from .sequence import LabeledSample, SkeletonSequence, resample_sequence
from .graph import GraphTopology, default_topology, normalized_adjacency, partition_edges
from .dataset import annotation_reliability, load_dataset, write_dataset

__all__ = [
    "RandomStream",
    "SkeletonSequence",
    "LabeledSample",
    "resample_sequence",
    "GraphTopology",
    "default_topology",
    "normalized_adjacency",
    "partition_edges",
    "load_dataset",
    "write_dataset",
    "annotation_reliability",
]

__version__ = "0.1.0"
