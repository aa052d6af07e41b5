"""Pairwise lateral similarity between mass channels and the channel-level graph.

Similarity (Pearson by default, cosine as alternative) is computed over the
masked pixels only. Zero-variance channels carry no localization signal: they
get similarity 0 to every other channel, a zero diagonal, and are reported as
degenerate. Negative correlations never become edges; co-localization is
positive similarity.

The NodeTrix view of a node subset is the adjacency submatrix reordered by
average-linkage seriation so that tight blocks end up contiguous.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import MsiDataset
from .errors import InsufficientDataError, NotFoundError

MEASURES = ("pearson", "cosine")


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetric channel-by-channel similarity with degenerate channels flagged."""

    channel_ids: tuple[str, ...]
    values: np.ndarray  # (n, n) float64 in [-1, 1]
    measure: str
    degenerate_channels: tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.channel_ids)


def compute_similarity(ds: MsiDataset, measure: str = "pearson") -> SimilarityMatrix:
    """Similarity of every unordered channel pair over the masked pixels."""
    if measure not in MEASURES:
        raise ValueError(f"unknown similarity measure {measure!r}; expected one of {MEASURES}")
    if ds.n_channels < 2:
        raise InsufficientDataError(f"similarity needs at least 2 channels, dataset has {ds.n_channels}")

    x = np.stack([ch.intensities for ch in ds.channels])  # (n_channels, n_valid)
    degenerate = np.ptp(x, axis=1) == 0.0

    if measure == "pearson":
        centered = x - x.mean(axis=1, keepdims=True)
        norms = np.linalg.norm(centered, axis=1)
    else:
        centered = x
        norms = np.linalg.norm(x, axis=1)
        # A constant channel has no spatial structure either way; treat it as
        # degenerate under cosine too so both measures agree on the flag.
    safe = np.where(norms > 0, norms, 1.0)
    unit = centered / safe[:, None]
    values = np.clip(unit @ unit.T, -1.0, 1.0)

    np.fill_diagonal(values, 1.0)
    values[degenerate, :] = 0.0
    values[:, degenerate] = 0.0
    values.setflags(write=False)

    flagged = tuple(cid for cid, bad in zip(ds.channel_ids, degenerate) if bad)
    return SimilarityMatrix(channel_ids=ds.channel_ids, values=values,
                            measure=measure, degenerate_channels=flagged)


class ChannelGraph:
    """Undirected weighted graph over channel nodes; weights in (0, 1]."""

    def __init__(self, nodes: tuple[str, ...], edges: dict[tuple[str, str], float]):
        self.nodes = tuple(nodes)
        node_set = set(self.nodes)
        canonical: dict[tuple[str, str], float] = {}
        neighbors: dict[str, dict[str, float]] = {n: {} for n in self.nodes}
        for (a, b), w in edges.items():
            if a not in node_set or b not in node_set:
                raise NotFoundError(f"edge ({a!r}, {b!r}) references a node outside the graph")
            if a == b:
                raise ValueError(f"self-edge on {a!r} not allowed")
            key = (a, b) if a < b else (b, a)
            canonical[key] = float(w)
            neighbors[a][b] = float(w)
            neighbors[b][a] = float(w)
        self.edges = canonical
        self.neighbors = neighbors

    @property
    def isolated(self) -> tuple[str, ...]:
        return tuple(n for n in self.nodes if not self.neighbors[n])

    def weight(self, a: str, b: str) -> float:
        """Edge weight, or 0.0 when the pair is not connected."""
        return self.neighbors.get(a, {}).get(b, 0.0)

    def degree(self, node: str) -> float:
        return sum(self.neighbors[node].values())

    @property
    def n_edges(self) -> int:
        return len(self.edges)


def build_channel_graph(sim: SimilarityMatrix, tau: float) -> ChannelGraph:
    """Keep edges with similarity >= tau (and > 0); everything else is dropped.

    Nodes that lose all their edges are reported via ChannelGraph.isolated.
    """
    if not 0.0 <= tau < 1.0:
        raise ValueError(f"tau must be in [0, 1), got {tau}")
    ids = sim.channel_ids
    edges: dict[tuple[str, str], float] = {}
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            w = float(sim.values[i, j])
            if w >= tau and w > 0.0:
                edges[(ids[i], ids[j])] = w
    return ChannelGraph(nodes=ids, edges=edges)


@dataclass(frozen=True)
class NodeTrixMatrix:
    """Adjacency heatmap of a node subset: seriated order plus symmetric cells."""

    node_order: tuple[str, ...]
    cells: np.ndarray  # (k, k) float64 in [0, 1], zero where no edge


def _average_linkage_leaf_order(ids: list[str], dist: np.ndarray) -> list[str]:
    """Leaf order of average-linkage agglomeration with lower-id tie-breaks.

    Clusters are keyed by their smallest member id; on equal merge distance the
    lexicographically smallest key pair merges first, and the cluster with the
    smaller key contributes its leaves first. Deterministic by construction.
    """
    clusters: dict[int, list[int]] = {i: [i] for i in range(len(ids))}
    while len(clusters) > 1:
        best: tuple[float, str, str, int, int] | None = None
        keys = sorted(clusters, key=lambda c: ids[min(clusters[c], key=lambda i: ids[i])])
        for ai in range(len(keys)):
            for bi in range(ai + 1, len(keys)):
                a, b = keys[ai], keys[bi]
                pair_dists = [dist[i, j] for i in clusters[a] for j in clusters[b]]
                d = float(np.mean(pair_dists))
                lead_a = ids[min(clusters[a], key=lambda i: ids[i])]
                lead_b = ids[min(clusters[b], key=lambda i: ids[i])]
                lo, hi = sorted((lead_a, lead_b))
                candidate = (d, lo, hi, a, b)
                if best is None or candidate[:3] < best[:3]:
                    best = candidate
        _, _, _, a, b = best
        first, second = (a, b) if ids[min(clusters[a], key=lambda i: ids[i])] <= ids[min(clusters[b], key=lambda i: ids[i])] else (b, a)
        clusters[first] = clusters[first] + clusters[second]
        del clusters[second]
    (_, order), = clusters.items()
    return [ids[i] for i in order]


def nodetrix_matrix(graph: ChannelGraph, node_set: set[str] | list[str] | tuple[str, ...]) -> NodeTrixMatrix:
    """Edge-weight submatrix of node_set, seriated so blocks become contiguous."""
    requested = sorted(set(node_set))
    if not requested:
        raise ValueError("node_set must be nonempty")
    known = set(graph.nodes)
    for node in requested:
        if node not in known:
            raise NotFoundError(f"unknown node id {node!r}")

    k = len(requested)
    sub = np.zeros((k, k), dtype=np.float64)
    for i in range(k):
        for j in range(i + 1, k):
            w = graph.weight(requested[i], requested[j])
            sub[i, j] = sub[j, i] = w

    if k > 2:
        order = _average_linkage_leaf_order(requested, 1.0 - sub)
    else:
        order = requested
    index = {node: i for i, node in enumerate(requested)}
    perm = [index[node] for node in order]
    cells = sub[np.ix_(perm, perm)]
    cells.setflags(write=False)
    return NodeTrixMatrix(node_order=tuple(order), cells=cells)
