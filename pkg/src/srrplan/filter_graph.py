"""Per-layer filter graphs.

Each live filter becomes a point on the unit sphere in R^n (n = in*kh*kw)
after flattening and L2 normalization. Two unit vertices are adjacent when
their Euclidean distance divided by sqrt(n) is at most gamma. Zero-norm
filters are kept as isolated, flagged vertices.

Distances are accumulated in float64 even though weights are stored as
float32, so the threshold decision is stable across platforms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import ValidationError
from .weights_io import LayerTensor

ZERO_NORM_EPS = 1e-12
UNIT_TOL = 1e-9

UNIT = "unit"
ZERO = "zero"


@dataclass(frozen=True, eq=False)
class FilterVector:
    """One filter as a point on the unit sphere (or the flagged origin)."""

    index: int            # filter index within its layer, stable across removals
    coords: np.ndarray    # float64, length n; all zeros when norm_flag == ZERO
    norm_flag: str        # UNIT or ZERO
    raw_l1: float = 0.0   # L1 norm of the unnormalized filter

    def __post_init__(self):
        coords = np.ascontiguousarray(self.coords, dtype=np.float64).reshape(-1)
        object.__setattr__(self, "coords", coords)
        if self.norm_flag == UNIT:
            norm = float(np.linalg.norm(coords))
            if abs(norm - 1.0) > UNIT_TOL:
                raise ValidationError(
                    f"vertex {self.index}: flagged unit but |coords| = {norm!r}")
        elif self.norm_flag == ZERO:
            if np.any(coords != 0.0):
                raise ValidationError(
                    f"vertex {self.index}: flagged zero but coords are not all zero")
        else:
            raise ValidationError(f"vertex {self.index}: unknown norm flag {self.norm_flag!r}")

    @property
    def dim(self) -> int:
        return self.coords.shape[0]


@dataclass(frozen=True, eq=False)
class FilterGraph:
    """Immutable graph over the live filters of one layer."""

    gamma: float
    dim: int
    vertices: tuple[FilterVector, ...]
    adj: np.ndarray  # bool (n, n), symmetric, False diagonal; positional
    _pos: dict = field(init=False, repr=False)

    def __post_init__(self):
        n = len(self.vertices)
        if self.adj.shape != (n, n):
            raise ValidationError(f"adjacency shape {self.adj.shape} for {n} vertices")
        pos = {v.index: p for p, v in enumerate(self.vertices)}
        if len(pos) != n:
            raise ValidationError("duplicate vertex indices")
        object.__setattr__(self, "_pos", pos)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def indices(self) -> list[int]:
        return [v.index for v in self.vertices]

    def position(self, index: int) -> int:
        try:
            return self._pos[index]
        except KeyError:
            raise ValidationError(f"unknown vertex {index}") from None

    def vertex(self, index: int) -> FilterVector:
        return self.vertices[self.position(index)]

    def zero_indices(self) -> list[int]:
        return [v.index for v in self.vertices if v.norm_flag == ZERO]

    def raw_l1_of(self, index: int) -> float:
        return self.vertices[self.position(index)].raw_l1


def flatten_normalize(layer: LayerTensor) -> list[FilterVector]:
    """One unit vector per out-channel; norms below 1e-12 are flagged zero."""
    mat = layer.filters().astype(np.float64)
    l2 = np.linalg.norm(mat, axis=1)
    l1 = np.abs(mat).sum(axis=1)
    out = []
    for i in range(mat.shape[0]):
        if l2[i] < ZERO_NORM_EPS:
            out.append(FilterVector(i, np.zeros(mat.shape[1]), ZERO, float(l1[i])))
        else:
            out.append(FilterVector(i, mat[i] / l2[i], UNIT, float(l1[i])))
    return out


def build_graph(vectors, gamma: float) -> FilterGraph:
    """Edges join unit vertices whose normalized distance is <= gamma."""
    vectors = tuple(vectors)
    if gamma <= 0:
        raise ValidationError(f"gamma must be positive, got {gamma}")
    if not vectors:
        return FilterGraph(gamma, 0, (), np.zeros((0, 0), dtype=bool))
    dims = {v.dim for v in vectors}
    if len(dims) != 1:
        raise ValidationError(f"mixed vector dimensions: {sorted(dims)}")
    dim = dims.pop()
    n = len(vectors)
    coords = np.stack([v.coords for v in vectors])
    unit = np.array([v.norm_flag == UNIT for v in vectors])
    if n > 1:
        dist = squareform(pdist(coords))
    else:
        dist = np.zeros((1, 1))
    adj = (dist / math.sqrt(dim)) <= gamma
    adj &= unit[:, None] & unit[None, :]
    np.fill_diagonal(adj, False)
    return FilterGraph(gamma, dim, vectors, adj)


def build_layer_graph(layer: LayerTensor, gamma: float) -> FilterGraph:
    return build_graph(flatten_normalize(layer), gamma)


def degree(g: FilterGraph, v: int) -> int:
    return int(g.adj[g.position(v)].sum())


def graph_distance(g: FilterGraph, u: int, v: int) -> float:
    """Shortest path length in edges; math.inf when disconnected."""
    src, dst = g.position(u), g.position(v)
    if src == dst:
        return 0
    dist = _bfs(g.adj, src)
    return int(dist[dst]) if dist[dst] >= 0 else math.inf


def _bfs(adj: np.ndarray, src: int) -> np.ndarray:
    """Hop counts from src; -1 where unreachable."""
    n = adj.shape[0]
    dist = np.full(n, -1, dtype=np.int64)
    dist[src] = 0
    frontier = np.zeros(n, dtype=bool)
    frontier[src] = True
    hops = 0
    while frontier.any():
        hops += 1
        frontier = adj[frontier].any(axis=0) & (dist < 0)
        dist[frontier] = hops
    return dist


def component_labels(g: FilterGraph) -> np.ndarray:
    """Positional component ids, numbered in order of first appearance."""
    n = g.n
    labels = np.full(n, -1, dtype=np.int64)
    k = 0
    for start in range(n):
        if labels[start] >= 0:
            continue
        reach = _bfs(g.adj, start) >= 0
        labels[reach] = k
        k += 1
    return labels


def connected_components(g: FilterGraph) -> tuple[int, dict[int, int]]:
    """Quotient space size k and a vertex -> component id labeling."""
    labels = component_labels(g)
    k = int(labels.max()) + 1 if g.n else 0
    return k, {g.vertices[p].index: int(labels[p]) for p in range(g.n)}


def remove_vertex(g: FilterGraph, v: int) -> FilterGraph:
    """Induced subgraph without v; edges are distance facts, never recomputed."""
    p = g.position(v)
    keep = [i for i in range(g.n) if i != p]
    vertices = tuple(g.vertices[i] for i in keep)
    adj = g.adj[np.ix_(keep, keep)]
    return FilterGraph(g.gamma, g.dim, vertices, adj)


def ball_matrix(g: FilterGraph, ell: int) -> np.ndarray:
    """Row v = membership mask of the radius-ell ball around v (positional)."""
    if ell < 1:
        raise ValidationError(f"ball radius must be >= 1, got {ell}")
    reach = g.adj | np.eye(g.n, dtype=bool)
    ball = reach.copy()
    for _ in range(ell - 1):
        ball = (ball.astype(np.uint8) @ reach.astype(np.uint8)) > 0
    return ball
