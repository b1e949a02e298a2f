"""Random adjacency generators and unit-sphere realizations.

Any adjacency matrix A can be realized as unit vectors whose thresholded
pairwise distances reproduce exactly A: take the Gram matrix M = I + c*A
with c = 0.9/(|lambda_min(A)| + 1). Every eigenvalue of M is then at least
1 - 0.9 > 0, so M factors as X X^T with unit rows; adjacent pairs sit at
chord distance sqrt(2-2c) and non-adjacent pairs at sqrt(2), and any
threshold strictly between the two recovers A through build_graph. This
lets property tests and benchmarks exercise the real graph-construction
code on arbitrary target graphs.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import ValidationError
from .filter_graph import UNIT, FilterGraph, FilterVector, build_graph


def er_adjacency(n: int, density: float, rng: np.random.Generator) -> np.ndarray:
    """Symmetric Bernoulli(density) adjacency with an empty diagonal."""
    if n < 1:
        raise ValidationError(f"graph size must be positive, got {n}")
    if not 0.0 <= density <= 1.0:
        raise ValidationError(f"density must lie in [0,1], got {density}")
    upper = np.triu(rng.random((n, n)) < density, k=1)
    return upper | upper.T


def hub_chain_adjacency(n: int, hubs: int, rng: np.random.Generator) -> np.ndarray:
    """Connected graph whose 1-covering number is exactly `hubs`.

    `hubs` chained hub vertices each carry a private group of leaves
    attached to that hub; within a group the leaves form a complete graph
    minus a perfect matching (a leftover leaf stays a pendant). Hub balls
    cover everything, so the hub set is a cover. No leaf ball covers its
    whole group (each misses its matching partner, pendants miss
    everything), so a hubless group costs at least two centers, and by
    disjointness any cover of size `hubs` must take every hub: the hub set
    is the unique minimum cover. One leaf per hub is pairwise distance
    >= 3, matching the lower bound. Hubs take the highest labels; the
    assignment of leaves to hubs is shuffled by rng.
    """
    if hubs < 1:
        raise ValidationError(f"need at least one hub, got {hubs}")
    if n < 3 * hubs:
        raise ValidationError(f"need at least {3 * hubs} vertices for {hubs} hubs, got {n}")
    leaves = rng.permutation(n - hubs)
    groups = np.array_split(leaves, hubs)
    adj = np.zeros((n, n), dtype=bool)
    hub_ids = list(range(n - hubs, n))
    for h0, h1 in zip(hub_ids, hub_ids[1:]):
        adj[h0, h1] = adj[h1, h0] = True
    for hub, group in zip(hub_ids, groups):
        members = [int(v) for v in group]
        for v in members:
            adj[hub, v] = adj[v, hub] = True
        paired = members if len(members) % 2 == 0 else members[1:]
        partner = {}
        for i in range(0, len(paired), 2):
            partner[paired[i]] = paired[i + 1]
            partner[paired[i + 1]] = paired[i]
        for i, u in enumerate(paired):
            for v in paired[i + 1:]:
                if partner[u] != v:
                    adj[u, v] = adj[v, u] = True
    return adj


def realize(adj: np.ndarray) -> tuple[list[FilterVector], float]:
    """Unit vectors and a threshold that rebuild exactly the given graph."""
    adj = np.asarray(adj, dtype=bool)
    n = adj.shape[0]
    if adj.shape != (n, n) or n < 1:
        raise ValidationError(f"adjacency must be square and nonempty, got {adj.shape}")
    if adj.diagonal().any() or not np.array_equal(adj, adj.T):
        raise ValidationError("adjacency must be symmetric with an empty diagonal")
    if n == 1:
        coords = np.ones(1)
        return [FilterVector(0, coords, UNIT, 1.0)], 0.5

    a = adj.astype(np.float64)
    lam_min = float(np.linalg.eigvalsh(a)[0])
    c = 0.9 / (abs(lam_min) + 1.0)
    gram = np.eye(n) + c * a
    w, v = np.linalg.eigh(gram)
    coords = v * np.sqrt(np.clip(w, 0.0, None))
    coords /= np.linalg.norm(coords, axis=1, keepdims=True)

    chord_edge = math.sqrt(2.0 - 2.0 * c)
    chord_non = math.sqrt(2.0)
    if adj.any():
        gamma = (chord_edge + chord_non) / 2.0 / math.sqrt(n)
    else:
        gamma = chord_non / 2.0 / math.sqrt(n)
    vectors = [FilterVector(i, coords[i], UNIT, float(np.abs(coords[i]).sum()))
               for i in range(n)]
    return vectors, gamma


def realized_graph(adj: np.ndarray) -> FilterGraph:
    vectors, gamma = realize(adj)
    return build_graph(vectors, gamma)
