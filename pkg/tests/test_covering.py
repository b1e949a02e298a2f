import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from srrplan.covering import (ORACLE_VERTEX_GUARD, CoverEstimate,
                              covering_oracle, estimate_n1c, greedy_cover)
from srrplan.errors import ValidationError
from srrplan.filter_graph import graph_distance
from srrplan.graphgen import er_adjacency, realized_graph


def path_graph(n):
    adj = np.zeros((n, n), dtype=bool)
    for i in range(n - 1):
        adj[i, i + 1] = adj[i + 1, i] = True
    return realized_graph(adj)


def reference_min_cover(g, ell):
    """Slow reference: scan the whole power set with BFS ball membership.

    Written independently of covering.py; keep for <= 10 vertices.
    """
    verts = list(range(g.n))
    best = g.n
    for size in range(1, g.n + 1):
        if size >= best:
            break
        for centers in itertools.combinations(verts, size):
            ok = all(
                any(graph_distance(g, g.vertices[v].index,
                                   g.vertices[c].index) <= ell
                    for c in centers)
                for v in verts)
            if ok:
                best = min(best, size)
                break
    return best


class TestOracle:
    def test_path5_exact(self):
        assert covering_oracle(path_graph(5), 1) == 2

    def test_complete_graph(self):
        adj = ~np.eye(6, dtype=bool)
        assert covering_oracle(realized_graph(adj), 1) == 1

    def test_edgeless_graph(self):
        adj = np.zeros((7, 7), dtype=bool)
        assert covering_oracle(realized_graph(adj), 1) == 7

    def test_additive_over_components(self):
        adj = np.zeros((6, 6), dtype=bool)
        for i in (0, 3):
            adj[i, i + 1] = adj[i + 1, i] = True
            adj[i + 1, i + 2] = adj[i + 2, i + 1] = True
        assert covering_oracle(realized_graph(adj), 1) == 2

    def test_radius2_path(self):
        # one radius-2 ball centered mid-path covers all five vertices
        assert covering_oracle(path_graph(5), 2) == 1

    def test_guard_triggers(self):
        g = realized_graph(er_adjacency(ORACLE_VERTEX_GUARD + 1, 0.5,
                                        np.random.default_rng(0)))
        with pytest.raises(ValidationError, match="max_vertices=None"):
            covering_oracle(g)

    def test_guard_override(self):
        g = realized_graph(er_adjacency(ORACLE_VERTEX_GUARD + 1, 0.9,
                                        np.random.default_rng(1)))
        assert covering_oracle(g, 1, max_vertices=None) >= 1

    @given(st.integers(0, 10 ** 6), st.integers(2, 9), st.floats(0.1, 0.9))
    @settings(max_examples=30, deadline=None)
    def test_matches_power_set_reference(self, seed, n, density):
        g = realized_graph(er_adjacency(n, density, np.random.default_rng(seed)))
        assert covering_oracle(g, 1) == reference_min_cover(g, 1)


class TestGreedy:
    def test_path5_trace(self):
        g = path_graph(5)
        centers, n1 = greedy_cover(g, 1)
        assert centers == [2, 0, 4]
        assert n1 == 3

    def test_path5_radius2_trace(self):
        g = path_graph(5)
        centers, n2 = greedy_cover(g, 2)
        assert centers == [2]
        assert n2 == 1

    def test_estimate_path5(self):
        est = estimate_n1c(path_graph(5))
        assert (est.n1, est.n2) == (3, 1)
        assert est.estimate == 2.0
        assert est.gap == 2

    def test_centers_cover_everything(self):
        g = realized_graph(er_adjacency(30, 0.15, np.random.default_rng(7)))
        centers, _ = greedy_cover(g, 1)
        for v in range(g.n):
            assert min(graph_distance(g, v, c) for c in centers) <= 1

    def test_radius2_centers_pairwise_far(self):
        for seed in range(8):
            g = realized_graph(er_adjacency(24, 0.12,
                                            np.random.default_rng(seed)))
            centers, _ = greedy_cover(g, 2)
            for a, b in itertools.combinations(centers, 2):
                assert graph_distance(g, a, b) >= 3

    def test_residual_degrees_still_valid(self):
        g = realized_graph(er_adjacency(20, 0.2, np.random.default_rng(3)))
        centers, _ = greedy_cover(g, 1, residual_degrees=True)
        for v in range(g.n):
            assert min(graph_distance(g, v, c) for c in centers) <= 1

    def test_isolated_vertices_become_centers(self):
        adj = np.zeros((3, 3), dtype=bool)
        centers, n1 = greedy_cover(realized_graph(adj), 1)
        assert sorted(centers) == [0, 1, 2]
        assert n1 == 3


class TestCoverEstimate:
    def test_bounds_must_be_ordered(self):
        with pytest.raises(ValidationError, match="out of order"):
            CoverEstimate(n1=2, n2=5)

    def test_midpoint(self):
        est = CoverEstimate(n1=5, n2=2)
        assert est.estimate == 3.5


@given(st.integers(0, 10 ** 6), st.integers(2, 14), st.floats(0.05, 0.9))
@settings(max_examples=60, deadline=None)
def test_sandwich_property(seed, n, density):
    g = realized_graph(er_adjacency(n, density, np.random.default_rng(seed)))
    est = estimate_n1c(g)
    exact = covering_oracle(g, 1)
    assert est.n2 <= exact <= est.n1
