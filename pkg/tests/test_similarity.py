"""Similarity measures, graph thresholding, and NodeTrix seriation."""

import random

import numpy as np
import pytest

from mcsg import (ChannelGraph, InsufficientDataError, MassChannelImage, MsiDataset,
                  NotFoundError, PixelGrid, build_channel_graph, compute_similarity,
                  nodetrix_matrix)
from oracles import cosine_reference, pearson_reference


def dataset_from_rows(rows, width=None):
    """Stack row vectors as channels on a fully valid 1 x n grid."""
    n = len(rows[0])
    width = width or n
    grid = PixelGrid(width=width, height=n // width, mask=np.ones((n // width, width), dtype=bool))
    channels = [
        MassChannelImage(channel_id=f"c{i}", mz=100.0 + i, intensities=np.array(row, dtype=float))
        for i, row in enumerate(rows)
    ]
    return MsiDataset(grid=grid, channels=channels)


class TestComputeSimilarity:
    def test_identical_images_correlate_fully(self):
        ds = dataset_from_rows([[1.0, 2.0, 3.0, 4.0], [1.0, 2.0, 3.0, 4.0]])
        sim = compute_similarity(ds)
        assert sim.values[0, 1] == pytest.approx(1.0, abs=1e-12)

    def test_reflected_image_anticorrelates(self):
        x = [1.0, 2.0, 3.0, 4.0]
        reflected = [max(x) - v for v in x]  # affine with negative slope
        sim = compute_similarity(dataset_from_rows([x, reflected]))
        assert sim.values[0, 1] == pytest.approx(-1.0, abs=1e-12)

    @pytest.mark.parametrize("measure,reference",
                             [("pearson", pearson_reference), ("cosine", cosine_reference)])
    def test_matches_two_pass_reference(self, measure, reference):
        rng = np.random.default_rng(42)
        rows = rng.uniform(0.0, 50.0, size=(10, 256))
        ds = dataset_from_rows(rows.tolist(), width=16)
        sim = compute_similarity(ds, measure=measure)
        for i in range(10):
            for j in range(10):
                expected = 1.0 if i == j else reference(rows[i], rows[j])
                assert sim.values[i, j] == pytest.approx(expected, abs=1e-9)

    def test_degenerate_channel_zeroed_and_flagged(self):
        ds = dataset_from_rows([[1.0, 2.0, 3.0, 4.0], [5.0, 5.0, 5.0, 5.0]])
        for measure in ("pearson", "cosine"):
            sim = compute_similarity(ds, measure=measure)
            assert sim.degenerate_channels == ("c1",)
            assert sim.values[1, 1] == 0.0
            assert sim.values[0, 1] == 0.0
            assert sim.values[0, 0] == 1.0

    def test_needs_two_channels(self):
        ds = dataset_from_rows([[1.0, 2.0, 3.0, 4.0]])
        with pytest.raises(InsufficientDataError):
            compute_similarity(ds)

    def test_pearson_affine_invariance_per_channel(self):
        rng = np.random.default_rng(7)
        base = rng.uniform(0.0, 10.0, size=(4, 64))
        sim0 = compute_similarity(dataset_from_rows(base.tolist(), width=8))
        slopes = rng.uniform(0.5, 5.0, size=(4, 1))  # positive, one per channel
        intercepts = rng.uniform(0.0, 20.0, size=(4, 1))
        sim1 = compute_similarity(dataset_from_rows((base * slopes + intercepts).tolist(), width=8))
        assert np.allclose(sim0.values, sim1.values, atol=1e-9)

    def test_symmetric_and_clipped(self):
        rng = np.random.default_rng(3)
        rows = rng.uniform(0.0, 1.0, size=(6, 36))
        sim = compute_similarity(dataset_from_rows(rows.tolist(), width=6))
        assert np.array_equal(sim.values, sim.values.T)
        assert np.all(sim.values >= -1.0) and np.all(sim.values <= 1.0)


def uniform_similarity(n, off_diagonal):
    values = np.full((n, n), off_diagonal)
    np.fill_diagonal(values, 1.0)
    ids = tuple(f"c{i}" for i in range(n))
    from mcsg import SimilarityMatrix
    return SimilarityMatrix(channel_ids=ids, values=values, measure="pearson",
                            degenerate_channels=())


def components(graph: ChannelGraph):
    seen, out = set(), []
    for node in graph.nodes:
        if node in seen or not graph.neighbors[node]:
            continue
        group, queue = set(), [node]
        while queue:
            v = queue.pop()
            if v in group:
                continue
            group.add(v)
            queue.extend(graph.neighbors[v])
        seen |= group
        out.append(frozenset(group))
    return out


class TestBuildChannelGraph:
    def test_complete_graph_below_threshold(self):
        graph = build_channel_graph(uniform_similarity(5, 0.9), tau=0.5)
        assert graph.n_edges == 10
        assert all(w == 0.9 for w in graph.edges.values())
        assert graph.isolated == ()

    def test_threshold_above_everything(self):
        graph = build_channel_graph(uniform_similarity(5, 0.9), tau=0.95)
        assert graph.n_edges == 0
        assert len(graph.isolated) == 5

    def test_three_block_structure(self):
        ids = tuple(f"c{i}" for i in range(9))
        values = np.full((9, 9), 0.2)
        for start in (0, 3, 6):
            values[start:start + 3, start:start + 3] = 0.8
        np.fill_diagonal(values, 1.0)
        from mcsg import SimilarityMatrix
        sim = SimilarityMatrix(channel_ids=ids, values=values, measure="pearson",
                               degenerate_channels=())
        graph = build_channel_graph(sim, tau=0.5)
        assert sorted(components(graph), key=min) == [
            frozenset({"c0", "c1", "c2"}), frozenset({"c3", "c4", "c5"}),
            frozenset({"c6", "c7", "c8"})]

    def test_monotone_in_tau(self):
        rng = np.random.default_rng(11)
        rows = rng.uniform(0.0, 1.0, size=(8, 64))
        sim = compute_similarity(dataset_from_rows(rows.tolist(), width=8))
        taus = sorted(rng.uniform(0.0, 0.99, size=6))
        previous = None
        for tau in reversed(taus):  # tighten going up: check subset chain
            edges = set(build_channel_graph(sim, tau).edges)
            if previous is not None:
                assert previous <= edges
            previous = edges

    def test_negative_similarity_never_an_edge(self):
        x = [1.0, 2.0, 3.0, 4.0]
        ds = dataset_from_rows([x, [max(x) - v for v in x]])
        graph = build_channel_graph(compute_similarity(ds), tau=0.0)
        assert graph.n_edges == 0

    def test_tau_domain(self):
        with pytest.raises(ValueError):
            build_channel_graph(uniform_similarity(3, 0.5), tau=1.0)


class TestNodeTrix:
    def clique_pair_graph(self):
        nodes = tuple("abcdef")
        edges = {}
        for group in ("abc", "def"):
            for i in range(3):
                for j in range(i + 1, 3):
                    edges[(group[i], group[j])] = 0.9
        edges[("c", "d")] = 0.3
        return ChannelGraph(nodes=nodes, edges=edges)

    def test_singleton_has_no_self_edge(self):
        graph = ChannelGraph(nodes=("a",), edges={})
        matrix = nodetrix_matrix(graph, {"a"})
        assert matrix.node_order == ("a",)
        assert matrix.cells.tolist() == [[0.0]]

    def test_pair_matrix(self):
        graph = ChannelGraph(nodes=("a", "b"), edges={("a", "b"): 0.7})
        matrix = nodetrix_matrix(graph, {"a", "b"})
        assert matrix.cells.tolist() == [[0.0, 0.7], [0.7, 0.0]]

    def test_seriation_places_cliques_contiguously(self):
        matrix = nodetrix_matrix(self.clique_pair_graph(), set("abcdef"))
        positions = {node: i for i, node in enumerate(matrix.node_order)}
        for group in ("abc", "def"):
            indexes = sorted(positions[n] for n in group)
            assert indexes in ([0, 1, 2], [3, 4, 5])

    def test_cells_match_graph_weights_and_symmetry(self):
        graph = self.clique_pair_graph()
        matrix = nodetrix_matrix(graph, set("abcdef"))
        assert np.array_equal(matrix.cells, matrix.cells.T)
        for i, a in enumerate(matrix.node_order):
            for j, b in enumerate(matrix.node_order):
                expected = 0.0 if a == b else graph.weight(a, b)
                assert matrix.cells[i, j] == expected

    def test_order_is_permutation_of_request(self):
        rng = random.Random(5)
        from conftest import random_weighted_graph
        graph = random_weighted_graph(rng, 9, edge_p=0.5)
        subset = {"n00", "n03", "n05", "n08"}
        matrix = nodetrix_matrix(graph, subset)
        assert set(matrix.node_order) == subset

    def test_unknown_node(self):
        graph = ChannelGraph(nodes=("a",), edges={})
        with pytest.raises(NotFoundError, match="ghost"):
            nodetrix_matrix(graph, {"ghost"})
