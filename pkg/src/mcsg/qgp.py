"""Quantitative graph properties per channel node, with exploration flags.

All metrics run on the channel-level graph only; community and hybrid edges
never enter any statistic. Shortest paths use distance 1 - weight, so high
similarity means a short edge. Community-relative metrics (within-community
z-score, participation, misassignment) use the finest hierarchy level, which
is the level manual edits act on.

The flag set is a documented replacement heuristic for hub / singleton /
bridge / misassignment screening, not a canonical definition; thresholds are
configurable on QgpThresholds.
"""

from __future__ import annotations

import heapq
import io
from dataclasses import dataclass

import numpy as np

from .communities import Mcsg
from .errors import NotFoundError

_DISTANCE_TIE = 1e-12

METRICS = ("weighted_degree", "within_community_degree_z", "participation_coefficient",
           "betweenness", "local_clustering_coefficient")

FLAGS = ("hub", "singleton", "bridge", "misassigned_candidate")


@dataclass(frozen=True)
class QgpThresholds:
    hub_z: float = 2.0
    singleton_degree_percentile: float = 5.0
    singleton_weight_margin: float = 0.05
    misassigned_ratio: float = 1.5
    bridge_betweenness_percentile: float = 90.0
    bridge_participation: float = 0.5


@dataclass(frozen=True)
class NodeMetrics:
    node_id: str
    weighted_degree: float
    within_community_degree_z: float
    participation_coefficient: float
    betweenness: float
    local_clustering_coefficient: float
    flags: frozenset[str]


@dataclass(frozen=True)
class QgpReport:
    nodes: dict[str, NodeMetrics]  # keyed by node id, in channel order
    thresholds: QgpThresholds
    tau: float

    def metric_values(self, metric: str) -> dict[str, float]:
        if metric not in METRICS:
            raise NotFoundError(f"unknown metric {metric!r}; expected one of {METRICS}")
        return {nid: getattr(m, metric) for nid, m in self.nodes.items()}

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("node_id," + ",".join(METRICS) + ",flags\n")
        for nid, m in self.nodes.items():
            values = ",".join(repr(getattr(m, metric)) for metric in METRICS)
            out.write(f"{nid},{values},{';'.join(sorted(m.flags))}\n")
        return out.getvalue()


def betweenness_centrality(nodes: tuple[str, ...] | list[str],
                           neighbors: dict[str, dict[str, float]]) -> dict[str, float]:
    """Normalized weighted betweenness (Brandes accumulation, distance 1 - w).

    Path counts treat distances equal within 1e-12 as ties. Normalization is
    (n-1)(n-2)/2 over all nodes of the graph, so a star center scores 1.
    """
    order = list(nodes)
    centrality = {v: 0.0 for v in order}
    n = len(order)
    if n < 3:
        return centrality

    for source in order:
        dist: dict[str, float] = {source: 0.0}
        sigma: dict[str, float] = {v: 0.0 for v in order}
        sigma[source] = 1.0
        preds: dict[str, list[str]] = {v: [] for v in order}
        settled: list[str] = []
        done: set[str] = set()
        heap: list[tuple[float, str]] = [(0.0, source)]
        while heap:
            d, v = heapq.heappop(heap)
            if v in done:
                continue
            done.add(v)
            settled.append(v)
            for u, w in neighbors.get(v, {}).items():
                if u in done:
                    continue
                candidate = d + (1.0 - w)
                known = dist.get(u)
                if known is None or candidate < known - _DISTANCE_TIE:
                    dist[u] = candidate
                    sigma[u] = sigma[v]
                    preds[u] = [v]
                    heapq.heappush(heap, (candidate, u))
                elif abs(candidate - known) <= _DISTANCE_TIE:
                    sigma[u] += sigma[v]
                    preds[u].append(v)

        delta = {v: 0.0 for v in order}
        for v in reversed(settled):
            for p in preds[v]:
                delta[p] += sigma[p] / sigma[v] * (1.0 + delta[v])
            if v != source:
                centrality[v] += delta[v]

    scale = (n - 1) * (n - 2)  # undirected: each pair visited from both endpoints
    return {v: c / scale for v, c in centrality.items()}


def _local_clustering(nodes: tuple[str, ...], neighbors: dict[str, dict[str, float]]) -> dict[str, float]:
    """Fraction of closed triangles among each node's neighbor pairs."""
    out = {}
    for v in nodes:
        adjacent = sorted(neighbors.get(v, {}))
        k = len(adjacent)
        if k < 2:
            out[v] = 0.0
            continue
        closed = sum(
            1 for i in range(k) for j in range(i + 1, k)
            if adjacent[j] in neighbors[adjacent[i]]
        )
        out[v] = 2.0 * closed / (k * (k - 1))
    return out


def compute_qgp(mcsg: Mcsg, tau: float | None = None,
                thresholds: QgpThresholds = QgpThresholds()) -> QgpReport:
    """Per-node metrics and flags over the channel-level graph.

    tau is the edge threshold the graph was built with; when unknown (e.g.
    imported graphs) it defaults to the smallest surviving edge weight.
    """
    graph = mcsg.graph
    nodes = graph.nodes
    if tau is None:
        tau = min(graph.edges.values()) if graph.edges else 0.0

    membership = mcsg.finest_membership()
    strength = {v: graph.degree(v) for v in nodes}
    betweenness = betweenness_centrality(nodes, graph.neighbors)
    clustering = _local_clustering(nodes, graph.neighbors)

    # Per-community strength-into-community tables for z, participation, misassignment.
    into: dict[str, dict[str, float]] = {}
    for v in nodes:
        shares: dict[str, float] = {}
        for u, w in graph.neighbors[v].items():
            community = membership.get(u)
            if community is not None:
                shares[community] = shares.get(community, 0.0) + w
        into[v] = shares

    within = {v: into[v].get(membership.get(v), 0.0) for v in nodes}
    z_score: dict[str, float] = {}
    by_community: dict[str, list[str]] = {}
    for v in nodes:
        community = membership.get(v)
        if community is not None:
            by_community.setdefault(community, []).append(v)
    for community, members in by_community.items():
        values = np.array([within[v] for v in members])
        mean, std = float(values.mean()), float(values.std())
        for v in members:
            z_score[v] = (within[v] - mean) / std if std > 0 else 0.0

    participation = {}
    for v in nodes:
        total = strength[v]
        if total <= 0:
            participation[v] = 0.0
        else:
            participation[v] = 1.0 - sum((s / total) ** 2 for s in into[v].values())

    non_isolated_strengths = np.array([strength[v] for v in nodes if graph.neighbors[v]])
    degree_floor = (float(np.percentile(non_isolated_strengths,
                                        thresholds.singleton_degree_percentile))
                    if non_isolated_strengths.size else 0.0)
    betweenness_values = np.array([betweenness[v] for v in nodes])
    bridge_floor = (float(np.percentile(betweenness_values,
                                        thresholds.bridge_betweenness_percentile))
                    if betweenness_values.size else 0.0)

    report: dict[str, NodeMetrics] = {}
    for v in nodes:
        flags: set[str] = set()
        z = z_score.get(v, 0.0)
        isolated = not graph.neighbors[v]
        if z >= thresholds.hub_z:
            flags.add("hub")
        if isolated or (
            strength[v] < degree_floor
            and all(w < tau + thresholds.singleton_weight_margin
                    for w in graph.neighbors[v].values())
        ):
            flags.add("singleton")
        own = within[v]
        others = [s for c, s in into[v].items() if c != membership.get(v)]
        if others and max(others) > thresholds.misassigned_ratio * own:
            flags.add("misassigned_candidate")
        if (betweenness[v] >= bridge_floor
                and participation[v] >= thresholds.bridge_participation):
            flags.add("bridge")
        report[v] = NodeMetrics(
            node_id=v,
            weighted_degree=strength[v],
            within_community_degree_z=z,
            participation_coefficient=participation[v],
            betweenness=betweenness[v],
            local_clustering_coefficient=clustering[v],
            flags=frozenset(flags),
        )
    return QgpReport(nodes=report, thresholds=thresholds, tau=tau)


def rank_nodes(report: QgpReport, metric: str, descending: bool = True) -> list[str]:
    """Node ids ordered by a metric; ties broken by node id ascending."""
    values = report.metric_values(metric)
    ordered = sorted(values)  # id-ascending base order makes the sort stable on ties
    return sorted(ordered, key=lambda nid: values[nid], reverse=descending)
