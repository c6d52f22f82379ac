"""Skeleton graph topology, adjacency normalization, and the
centripetal/root/centrifugal edge partition."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

CENTRIPETAL = "centripetal"
ROOT = "root"
CENTRIFUGAL = "centrifugal"
PARTITIONS = (CENTRIPETAL, ROOT, CENTRIFUGAL)


@dataclass(frozen=True)
class GraphTopology:
    """Undirected bone graph over `joint_count` joints.

    `edges` are unordered joint-index pairs (bones); self-loops are
    implicit and always belong to the root partition subset.
    """

    joint_count: int
    edges: frozenset = field(default_factory=frozenset)
    root_joint: int = 0

    def __post_init__(self):
        if self.joint_count < 1:
            raise ValueError("joint_count must be >= 1")
        if not 0 <= self.root_joint < self.joint_count:
            raise ValueError("root_joint out of range")
        canon = set()
        for e in self.edges:
            i, j = int(e[0]), int(e[1])
            if not (0 <= i < self.joint_count and 0 <= j < self.joint_count):
                raise ValueError(f"edge ({i},{j}) out of range for {self.joint_count} joints")
            if i == j:
                continue  # self-loops are implicit
            canon.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(canon))

    def adjacency(self) -> np.ndarray:
        """Symmetric 0/1 bone adjacency A (no self-loops)."""
        a = np.zeros((self.joint_count, self.joint_count), dtype=np.float64)
        for i, j in self.edges:
            a[i, j] = 1.0
            a[j, i] = 1.0
        return a

    def hop_distances(self, source: int) -> np.ndarray:
        """Unweighted BFS hop counts from `source`; unreachable = -1."""
        dist = np.full(self.joint_count, -1, dtype=np.int64)
        dist[source] = 0
        adj: list[list[int]] = [[] for _ in range(self.joint_count)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist


def normalized_adjacency(topology: GraphTopology) -> np.ndarray:
    """Symmetric normalization D^-1/2 (A + I) D^-1/2.

    Self-loops guarantee every degree >= 1, so no zero-division guard
    is needed. The result is symmetric with eigenvalues in [-1, 1].
    """
    a_tilde = topology.adjacency() + np.eye(topology.joint_count)
    return _sym_normalize(a_tilde)


def _sym_normalize(mat: np.ndarray) -> np.ndarray:
    deg = mat.sum(axis=1)
    inv_sqrt = np.zeros_like(deg)
    nonzero = deg > 0
    inv_sqrt[nonzero] = deg[nonzero] ** -0.5
    return inv_sqrt[:, None] * mat * inv_sqrt[None, :]


def partition_edges(topology: GraphTopology, gravity_center: int | None = None) -> dict:
    """Split A + I into the three-way neighbor partition.

    For a directed entry (i, j) of A + I (message from j into i):
    root if i == j; centripetal if j is strictly closer (hop count) to
    the gravity center than i; centrifugal if strictly farther. Equal
    distance (including unreachable pairs within one component) breaks
    toward centripetal. The three subsets are disjoint and sum to A + I.
    """
    if gravity_center is None:
        gravity_center = topology.root_joint
    if not 0 <= gravity_center < topology.joint_count:
        raise ValueError("gravity_center out of range")
    n = topology.joint_count
    dist = _component_distances(topology, gravity_center)
    parts = {name: np.zeros((n, n), dtype=np.float64) for name in PARTITIONS}
    parts[ROOT] += np.eye(n)
    for i, j in topology.edges:
        for src, dst in ((j, i), (i, j)):
            # entry (dst, src): neighbor src seen from dst
            if dist[src] < dist[dst]:
                parts[CENTRIPETAL][dst, src] = 1.0
            elif dist[src] > dist[dst]:
                parts[CENTRIFUGAL][dst, src] = 1.0
            else:
                parts[CENTRIPETAL][dst, src] = 1.0  # tie-break
    return parts


def _component_distances(topology: GraphTopology, gravity_center: int) -> np.ndarray:
    """Hop distance to the gravity center, computed per component.

    Joints in components not containing the center measure distance to
    that component's lowest-index joint instead, so every bone edge
    still gets a well-defined near/far comparison.
    """
    dist = topology.hop_distances(gravity_center)
    while np.any(dist < 0):
        anchor = int(np.flatnonzero(dist < 0)[0])
        local = topology.hop_distances(anchor)
        dist[local >= 0] = np.where(dist[local >= 0] < 0, local[local >= 0], dist[local >= 0])
    return dist


def partitioned_adjacency(topology: GraphTopology, gravity_center: int | None = None) -> np.ndarray:
    """Stacked (3, N, N) partition matrices in PARTITIONS order."""
    parts = partition_edges(topology, gravity_center)
    return np.stack([parts[name] for name in PARTITIONS], axis=0)


def save_topology(topology: GraphTopology, path) -> None:
    payload = {
        "joint_count": topology.joint_count,
        "root": topology.root_joint,
        "edges": sorted([list(e) for e in topology.edges]),
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_topology(path) -> GraphTopology:
    payload = json.loads(Path(path).read_text())
    return GraphTopology(
        joint_count=int(payload["joint_count"]),
        edges=frozenset(tuple(e) for e in payload["edges"]),
        root_joint=int(payload["root"]),
    )


def default_topology(joint_count: int = 15) -> GraphTopology:
    """Small humanoid tree used by the synthetic datasets.

    0 pelvis - 1 spine - 2 chest - 3 neck - 4 head, arms hanging off
    the chest, legs off the pelvis. Only defined for 15 joints.
    """
    if joint_count != 15:
        raise ValueError("default topology is defined for 15 joints")
    edges = frozenset(
        {
            (0, 1), (1, 2), (2, 3), (3, 4),        # trunk + head
            (2, 5), (5, 6), (6, 7),                # left arm
            (2, 8), (8, 9), (9, 10),               # right arm
            (0, 11), (11, 12),                     # left leg
            (0, 13), (13, 14),                     # right leg
        }
    )
    return GraphTopology(joint_count=15, edges=edges, root_joint=0)
