"""Shared fixtures and random-structure generators for the test suite."""

from __future__ import annotations

import random

import numpy as np
import pytest

from mcsg import (BuildConfig, ChannelGraph, build_mcsg, detect_communities,
                  generate_synthetic_dataset, materialize_mcsg)


@pytest.fixture(scope="session")
def synthetic():
    """Low-noise planted dataset with ground truth; shared read-only."""
    return generate_synthetic_dataset(n_patterns=3, channels_per_pattern=15, seed=7)


@pytest.fixture(scope="session")
def synthetic_mcsg(synthetic):
    ds, _ = synthetic
    return build_mcsg(ds, BuildConfig())


def random_weighted_graph(rng: random.Random, n_nodes: int, edge_p: float = 0.4,
                          connected: bool = False,
                          weight_range: tuple[float, float] = (0.1, 0.95)) -> ChannelGraph:
    """Random graph over nodes n00..; weights away from 0 and 1 avoid ties."""
    nodes = tuple(f"n{i:02d}" for i in range(n_nodes))
    edges: dict[tuple[str, str], float] = {}
    lo, hi = weight_range
    for i in range(n_nodes):
        for j in range(i + 1, n_nodes):
            if rng.random() < edge_p:
                edges[(nodes[i], nodes[j])] = rng.uniform(lo, hi)
    if connected:
        order = list(range(n_nodes))
        rng.shuffle(order)
        for prev, cur in zip(order, order[1:]):
            a, b = sorted((nodes[prev], nodes[cur]))
            edges.setdefault((a, b), rng.uniform(lo, hi))
    return ChannelGraph(nodes=nodes, edges=edges)


def random_partition(rng: random.Random, items: list[str], n_groups: int) -> dict[str, str]:
    """Random surjective assignment of items onto n_groups labels."""
    items = list(items)
    rng.shuffle(items)
    labels = [f"g{k}" for k in range(n_groups)]
    membership = {}
    for k, item in enumerate(items):
        membership[item] = labels[k] if k < n_groups else rng.choice(labels)
    return membership


def random_mcsg(rng: random.Random, n_nodes: int = 10, edge_p: float = 0.5):
    """A materialized graph over a random connected topology."""
    graph = random_weighted_graph(rng, n_nodes, edge_p, connected=True)
    hierarchy = detect_communities(graph, seed=rng.randrange(10_000))
    return materialize_mcsg(graph, hierarchy, dataset_name=f"random-{n_nodes}")


def random_simple_polygon(rng: random.Random, width: int, height: int,
                          n_vertices: int = 8) -> list[tuple[float, float]]:
    """Star-shaped polygon around a random center: simple by construction."""
    cx = rng.uniform(width * 0.2, width * 0.8)
    cy = rng.uniform(height * 0.2, height * 0.8)
    angles = sorted(rng.uniform(0, 2 * np.pi) for _ in range(n_vertices))
    max_r = min(cx, cy, width - cx, height - cy)
    points = []
    for theta in angles:
        r = rng.uniform(0.3, 1.0) * max_r
        points.append((cx + r * np.cos(theta), cy + r * np.sin(theta)))
    return points


def random_edit_command(rng: random.Random, mcsg):
    """One random valid command for the graph's finest level, or None."""
    from mcsg import merge_command, reassign_command, split_command

    hierarchy = mcsg.hierarchy
    if hierarchy.n_levels == 0:
        return None
    finest = list(hierarchy.levels[hierarchy.finest_level])
    choices = []
    if len(finest) >= 2:
        choices += ["merge", "reassign"]
    if any(len(hierarchy.communities[c].members) >= 2 for c in finest):
        choices.append("split")
    if not choices:
        return None
    kind = rng.choice(choices)
    if kind == "merge":
        count = min(len(finest), rng.choice([2, 2, 3]))
        return merge_command(rng.sample(finest, count))
    if kind == "split":
        candidates = [c for c in finest if len(hierarchy.communities[c].members) >= 2]
        target = rng.choice(candidates)
        members = sorted(hierarchy.communities[target].members)
        rng.shuffle(members)
        cut = rng.randint(1, len(members) - 1)
        return split_command(target, members[:cut], members[cut:])
    source = rng.choice(finest)
    node = rng.choice(sorted(hierarchy.communities[source].members))
    destination = rng.choice([c for c in finest if c != source])
    return reassign_command(node, destination)
