"""Hierarchical communities on the channel graph and the materialized MCSG.

Community detection is weighted-modularity Louvain (resolution 1.0) with a
seeded node-visit order, re-run recursively inside each sufficiently large
community to realize the hierarchy. Level 0 is the coarsest partition; deeper
levels refine it. A level is only added while at least one community actually
splits; communities that do not split are carried down as pass-through
children so every level partitions the non-isolated channel nodes.

The MCSG then holds three edge categories: channel edges (similarity weight),
community edges (arithmetic mean of all channel edges running between the two
member sets), and hybrid edges (a fixed small epsilon, view-only indicators
that a visible channel node connects into a collapsed community). Hybrid
edges are derived from the expansion state and never persisted or counted in
any statistic.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import IntegrityError, NotFoundError
from .similarity import ChannelGraph

if TYPE_CHECKING:
    from .editing import EditCommand

DEFAULT_EPSILON = 0.01
_GAIN_TOLERANCE = 1e-12


@dataclass(frozen=True)
class CommunityNode:
    """One community: a set of channel nodes at one hierarchy level."""

    id: str
    level: int
    members: frozenset[str]
    parent: str | None


@dataclass(frozen=True)
class CommunityHierarchy:
    """Nested partitions of the non-isolated channel nodes, level 0 coarsest."""

    levels: tuple[tuple[str, ...], ...]  # community ids per level, display order
    communities: dict[str, CommunityNode]
    isolated: frozenset[str]

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    @property
    def finest_level(self) -> int:
        return len(self.levels) - 1

    def community(self, community_id: str) -> CommunityNode:
        try:
            return self.communities[community_id]
        except KeyError:
            raise NotFoundError(f"unknown community id {community_id!r}") from None

    def membership(self, level: int) -> dict[str, str]:
        """channel id -> community id at the given level."""
        out: dict[str, str] = {}
        for cid in self.levels[level]:
            for member in self.communities[cid].members:
                out[member] = cid
        return out

    def children(self, community_id: str) -> tuple[str, ...]:
        node = self.community(community_id)
        if node.level + 1 >= self.n_levels:
            return ()
        return tuple(c for c in self.levels[node.level + 1]
                     if self.communities[c].parent == community_id)


def modularity(partition: list[set[str]] | list[frozenset[str]],
               edges: dict[tuple[str, str], float],
               resolution: float = 1.0) -> float:
    """Weighted Newman modularity of a partition over an undirected edge dict."""
    m = sum(edges.values())
    if m <= 0:
        return 0.0
    community_of: dict[str, int] = {}
    for idx, group in enumerate(partition):
        for node in group:
            community_of[node] = idx
    internal = [0.0] * len(partition)
    degree = [0.0] * len(partition)
    for (a, b), w in edges.items():
        ca, cb = community_of[a], community_of[b]
        degree[ca] += w
        degree[cb] += w
        if ca == cb:
            internal[ca] += w
    return sum(inner / m - resolution * (deg / (2.0 * m)) ** 2
               for inner, deg in zip(internal, degree))


def _one_level(n: int, adjacency: list[dict[int, float]], self_loops: list[float],
               m: float, rng: random.Random, resolution: float) -> tuple[list[int], bool]:
    """One Louvain local-moving phase over an aggregated graph of n nodes."""
    k = [sum(adjacency[i].values()) + 2.0 * self_loops[i] for i in range(n)]
    node2com = list(range(n))
    com_tot = k[:]

    order = list(range(n))
    rng.shuffle(order)

    moved_any = False
    improved = True
    while improved:
        improved = False
        for i in order:
            old = node2com[i]
            com_tot[old] -= k[i]
            weight_to: dict[int, float] = {}
            for j, w in adjacency[i].items():
                c = node2com[j]
                weight_to[c] = weight_to.get(c, 0.0) + w
            candidates = sorted(set(weight_to) | {old})
            best_com, best_gain = old, None
            for c in candidates:
                gain = weight_to.get(c, 0.0) - resolution * k[i] * com_tot[c] / (2.0 * m)
                if best_gain is None or gain > best_gain + _GAIN_TOLERANCE:
                    best_com, best_gain = c, gain
            node2com[i] = best_com
            com_tot[best_com] += k[i]
            if best_com != old:
                improved = True
                moved_any = True
    return node2com, moved_any


def _louvain_single(ordered: list[str], adjacency: list[dict[int, float]], m: float,
                    rng: random.Random, resolution: float) -> list[frozenset[str]]:
    """One full Louvain run (local moving + aggregation) for one visit order."""
    n = len(ordered)
    adjacency = [dict(row) for row in adjacency]
    self_loops = [0.0] * n
    membership = list(range(n))  # original node index -> current supernode

    while True:
        node2com, moved = _one_level(n, adjacency, self_loops, m, rng, resolution)
        com_ids = sorted(set(node2com))
        if not moved or len(com_ids) == n:
            break
        relabel = {c: i for i, c in enumerate(com_ids)}
        membership = [relabel[node2com[membership[v]]] for v in range(len(membership))]
        # Aggregate: communities become supernodes; internal weight -> self-loop.
        n_new = len(com_ids)
        new_adj: list[dict[int, float]] = [{} for _ in range(n_new)]
        new_self = [0.0] * n_new
        for i in range(n):
            ci = relabel[node2com[i]]
            new_self[ci] += self_loops[i]
            for j, w in adjacency[i].items():
                if j < i:
                    continue
                cj = relabel[node2com[j]]
                if ci == cj:
                    new_self[ci] += w
                else:
                    new_adj[ci][cj] = new_adj[ci].get(cj, 0.0) + w
                    new_adj[cj][ci] = new_adj[cj].get(ci, 0.0) + w
        adjacency, self_loops, n = new_adj, new_self, n_new

    groups: dict[int, set[str]] = {}
    for v, node in enumerate(ordered):
        groups.setdefault(membership[v], set()).add(node)
    return [frozenset(g) for g in sorted(groups.values(), key=min)]


DEFAULT_RESTARTS = 8


def louvain_communities(nodes: list[str] | tuple[str, ...],
                        neighbors: dict[str, dict[str, float]],
                        seed: int = 0,
                        resolution: float = 1.0,
                        restarts: int = DEFAULT_RESTARTS) -> list[frozenset[str]]:
    """Seeded weighted Louvain partition of `nodes`, best of several restarts.

    Only edges with both endpoints in `nodes` count, so this runs unchanged on
    induced subgraphs during hierarchy recursion. Nodes without any such edge
    remain singleton communities. Greedy local moving is order-sensitive on
    small graphs, so the run repeats with `restarts` seed-derived visit orders
    and keeps the highest-modularity partition (first winner on exact ties).
    Deterministic for a given (graph, seed).
    """
    ordered = sorted(nodes)
    index = {node: i for i, node in enumerate(ordered)}
    n = len(ordered)
    adjacency: list[dict[int, float]] = [{} for _ in range(n)]
    edges: dict[tuple[str, str], float] = {}
    m = 0.0
    for node in ordered:
        i = index[node]
        for other, w in neighbors.get(node, {}).items():
            j = index.get(other)
            if j is None or j <= i:
                continue
            adjacency[i][j] = w
            adjacency[j][i] = w
            edges[(node, ordered[j])] = w
            m += w
    if m <= 0.0:
        return [frozenset([node]) for node in ordered]

    best: list[frozenset[str]] | None = None
    best_q = -math.inf
    for restart in range(max(1, restarts)):
        rng = random.Random(seed * 1_000_003 + restart)
        partition = _louvain_single(ordered, adjacency, m, rng, resolution)
        q = modularity(partition, edges, resolution)
        if q > best_q + _GAIN_TOLERANCE:
            best, best_q = partition, q
    return best


def detect_communities(graph: ChannelGraph, seed: int = 0, max_depth: int = 3,
                       min_split_size: int = 4) -> CommunityHierarchy:
    """Louvain partition at level 0, recursively refined into a hierarchy.

    Communities with more than min_split_size members are re-clustered on
    their induced subgraph; a deeper level is created only if at least one
    community splits. max_depth is the largest level index allowed (0 turns
    recursion off). An edgeless graph yields an empty hierarchy with every
    node isolated.
    """
    isolated = frozenset(graph.isolated)
    active = [node for node in graph.nodes if node not in isolated]
    if graph.n_edges == 0:
        return CommunityHierarchy(levels=(), communities={}, isolated=frozenset(graph.nodes))

    counter = 0

    def fresh_id() -> str:
        nonlocal counter
        cid = f"k{counter}"
        counter += 1
        return cid

    communities: dict[str, CommunityNode] = {}
    levels: list[tuple[str, ...]] = []

    level0_sets = louvain_communities(active, graph.neighbors, seed=seed)
    current: list[str] = []
    for members in sorted(level0_sets, key=min):
        cid = fresh_id()
        communities[cid] = CommunityNode(id=cid, level=0, members=members, parent=None)
        current.append(cid)
    levels.append(tuple(current))

    subcall = 0
    level = 0
    while level < max_depth:
        split_children: dict[str, list[frozenset[str]]] = {}
        any_split = False
        for cid in levels[level]:
            members = communities[cid].members
            if len(members) > min_split_size:
                subcall += 1
                parts = louvain_communities(sorted(members), graph.neighbors, seed=seed + subcall)
                if len(parts) > 1:
                    split_children[cid] = sorted(parts, key=min)
                    any_split = True
        if not any_split:
            break
        level += 1
        next_ids: list[str] = []
        for cid in levels[level - 1]:
            children = split_children.get(cid, [communities[cid].members])
            for part in children:
                child = fresh_id()
                communities[child] = CommunityNode(id=child, level=level, members=part, parent=cid)
                next_ids.append(child)
        levels.append(tuple(next_ids))

    return CommunityHierarchy(levels=tuple(levels), communities=communities, isolated=isolated)


def community_edges_for_membership(graph: ChannelGraph,
                                   membership: dict[str, str]) -> dict[tuple[str, str], float]:
    """Mean weight of the channel edges running between each community pair."""
    sums: dict[tuple[str, str], float] = {}
    counts: dict[tuple[str, str], int] = {}
    for (a, b), w in graph.edges.items():
        ca, cb = membership.get(a), membership.get(b)
        if ca is None or cb is None or ca == cb:
            continue
        key = (ca, cb) if ca < cb else (cb, ca)
        sums[key] = sums.get(key, 0.0) + w
        counts[key] = counts.get(key, 0) + 1
    return {key: sums[key] / counts[key] for key in sums}


@dataclass(frozen=True)
class Mcsg:
    """Materialized mass channel similarity graph.

    Value object: edits never mutate an instance, they derive a new one, so a
    reader always sees a consistent snapshot and undo is a reference swap.
    """

    dataset_name: str
    channel_ids: tuple[str, ...]
    mz: dict[str, float | None]
    graph: ChannelGraph
    hierarchy: CommunityHierarchy
    community_edges: tuple[dict[tuple[str, str], float], ...]  # one dict per level
    epsilon: float = DEFAULT_EPSILON
    edit_log: tuple["EditCommand", ...] = ()
    next_community_index: int = 0

    @property
    def isolated(self) -> frozenset[str]:
        return self.hierarchy.isolated

    def finest_membership(self) -> dict[str, str]:
        if self.hierarchy.n_levels == 0:
            return {}
        return self.hierarchy.membership(self.hierarchy.finest_level)


def validate_hierarchy(graph: ChannelGraph, hierarchy: CommunityHierarchy) -> None:
    """Raise IntegrityError when hierarchy and graph disagree."""
    nodes = set(graph.nodes)
    non_isolated = nodes - set(graph.isolated)
    if hierarchy.isolated != set(graph.isolated):
        raise IntegrityError("hierarchy's isolated set disagrees with the graph's edgeless nodes")
    for level, ids in enumerate(hierarchy.levels):
        seen: set[str] = set()
        for cid in ids:
            node = hierarchy.communities.get(cid)
            if node is None:
                raise IntegrityError(f"level {level} lists unknown community {cid!r}")
            if node.level != level:
                raise IntegrityError(f"community {cid!r} has level {node.level}, listed at {level}")
            if not node.members:
                raise IntegrityError(f"community {cid!r} is empty")
            unknown = node.members - nodes
            if unknown:
                raise IntegrityError(f"community {cid!r} member {sorted(unknown)[0]!r} not in graph")
            overlap = node.members & seen
            if overlap:
                raise IntegrityError(
                    f"level {level}: channel {sorted(overlap)[0]!r} assigned to multiple communities")
            seen |= node.members
            if node.parent is not None:
                parent = hierarchy.communities.get(node.parent)
                if parent is None or parent.level != level - 1:
                    raise IntegrityError(f"community {cid!r} has invalid parent {node.parent!r}")
                if not node.members <= parent.members:
                    raise IntegrityError(f"community {cid!r} has members outside parent {node.parent!r}")
            elif level > 0:
                raise IntegrityError(f"community {cid!r} at level {level} lacks a parent")
        if seen != non_isolated:
            missing = non_isolated - seen
            extra = seen - non_isolated
            detail = sorted(missing or extra)[0]
            raise IntegrityError(f"level {level} is not a partition of the non-isolated nodes "
                                 f"(offending node {detail!r})")


def materialize_mcsg(graph: ChannelGraph, hierarchy: CommunityHierarchy,
                     dataset_name: str = "dataset",
                     mz: dict[str, float | None] | None = None,
                     epsilon: float = DEFAULT_EPSILON) -> Mcsg:
    """Attach community edges (mean-weight law) to graph + hierarchy.

    All communities start collapsed; hybrid edges only exist on views.
    """
    validate_hierarchy(graph, hierarchy)
    per_level = tuple(
        community_edges_for_membership(graph, hierarchy.membership(level))
        for level in range(hierarchy.n_levels)
    )
    next_index = 0
    for cid in hierarchy.communities:
        if cid.startswith("k") and cid[1:].isdigit():
            next_index = max(next_index, int(cid[1:]) + 1)
    return Mcsg(
        dataset_name=dataset_name,
        channel_ids=graph.nodes,
        mz=dict(mz) if mz else {cid: None for cid in graph.nodes},
        graph=graph,
        hierarchy=hierarchy,
        community_edges=per_level,
        epsilon=epsilon,
        next_community_index=next_index,
    )


@dataclass(frozen=True)
class McsgView:
    """Expansion-dependent rendering of one hierarchy level.

    Members of expanded communities appear as channel nodes; collapsed
    communities stay single nodes. Hybrid edges mark a visible channel's
    connection into a collapsed community, all at the fixed epsilon weight.
    """

    level: int
    expanded: tuple[str, ...]
    visible_channels: tuple[str, ...]
    collapsed_communities: tuple[str, ...]
    channel_edges: tuple[tuple[str, str, float], ...]
    community_edges: tuple[tuple[str, str, float], ...]
    hybrid_edges: tuple[tuple[str, str, float], ...]


def compute_view(mcsg: Mcsg, expanded: set[str] | frozenset[str] | tuple[str, ...] = (),
                 level: int = 0) -> McsgView:
    """Derive the view of `level` for a set of expanded community ids."""
    if mcsg.hierarchy.n_levels == 0:
        if expanded:
            raise NotFoundError(f"unknown community id {sorted(expanded)[0]!r}")
        return McsgView(level=0, expanded=(), visible_channels=tuple(sorted(mcsg.graph.nodes)),
                        collapsed_communities=(), channel_edges=tuple(
                            (a, b, w) for (a, b), w in sorted(mcsg.graph.edges.items())),
                        community_edges=(), hybrid_edges=())
    if not 0 <= level < mcsg.hierarchy.n_levels:
        raise NotFoundError(f"hierarchy has no level {level}")
    level_ids = set(mcsg.hierarchy.levels[level])
    expanded_set = set(expanded)
    for cid in expanded_set:
        mcsg.hierarchy.community(cid)
        if cid not in level_ids:
            raise NotFoundError(f"community {cid!r} is not at level {level}")

    membership = mcsg.hierarchy.membership(level)
    visible = set(mcsg.isolated)
    for cid in expanded_set:
        visible |= mcsg.hierarchy.communities[cid].members
    collapsed = [cid for cid in mcsg.hierarchy.levels[level] if cid not in expanded_set]

    channel_edges = []
    hybrid: dict[tuple[str, str], float] = {}
    for (a, b), w in sorted(mcsg.graph.edges.items()):
        a_vis, b_vis = a in visible, b in visible
        if a_vis and b_vis:
            channel_edges.append((a, b, w))
        elif a_vis or b_vis:
            node, hidden = (a, b) if a_vis else (b, a)
            hybrid[(node, membership[hidden])] = mcsg.epsilon
    community_edges = [
        (a, b, w) for (a, b), w in sorted(mcsg.community_edges[level].items())
        if a not in expanded_set and b not in expanded_set
    ]
    return McsgView(
        level=level,
        expanded=tuple(sorted(expanded_set)),
        visible_channels=tuple(sorted(visible)),
        collapsed_communities=tuple(collapsed),
        channel_edges=tuple(channel_edges),
        community_edges=tuple(community_edges),
        hybrid_edges=tuple((node, cid, eps) for (node, cid), eps in sorted(hybrid.items())),
    )


def set_expansion(mcsg: Mcsg, community_id: str, expanded: bool,
                  current: McsgView | set[str] | None = None) -> McsgView:
    """Toggle one community's expansion state and return the updated view."""
    node = mcsg.hierarchy.community(community_id)
    if isinstance(current, McsgView):
        state = set(current.expanded)
    else:
        state = set(current or ())
    if expanded:
        state.add(community_id)
    else:
        state.discard(community_id)
    return compute_view(mcsg, expanded=state, level=node.level)
