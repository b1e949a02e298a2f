"""Exact and estimated ell-covering numbers of filter graphs.

The exact covering number is found by complete search over center subsets in
increasing cardinality (exponential; guarded at 25 vertices unless the caller
overrides). The estimate runs the greedy ball sequence at radii 1 and 2: the
radius-1 sequence is a valid cover (upper bound), the radius-2 centers are
pairwise at distance >= 3 so no radius-1 ball contains two of them (packing
lower bound), and the working estimate is the midpoint of the two.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .filter_graph import FilterGraph, ball_matrix, component_labels

ORACLE_VERTEX_GUARD = 25


@dataclass(frozen=True)
class CoverEstimate:
    """Greedy bounds n2 <= N1c <= n1 and the midpoint estimate."""

    n1: int
    n2: int
    centers1: tuple[int, ...] = ()
    centers2: tuple[int, ...] = ()

    def __post_init__(self):
        if not (1 <= self.n2 <= self.n1):
            raise ValidationError(f"cover bounds out of order: n1={self.n1} n2={self.n2}")

    @property
    def estimate(self) -> float:
        return (self.n1 + self.n2) / 2.0

    @property
    def gap(self) -> int:
        return self.n1 - self.n2


def covering_oracle(g: FilterGraph, ell: int = 1,
                    max_vertices: int | None = ORACLE_VERTEX_GUARD) -> int:
    """Exact minimum number of radius-ell balls covering all vertices."""
    if g.n == 0:
        raise ValidationError("covering oracle on an empty graph")
    if max_vertices is not None and g.n > max_vertices:
        raise ValidationError(
            f"oracle guard: graph has {g.n} vertices, limit is {max_vertices}; "
            "pass max_vertices=None to override")
    balls = ball_matrix(g, ell)
    labels = component_labels(g)
    # Covering number is additive over components, so solve each separately.
    total = 0
    for comp_id in range(int(labels.max()) + 1):
        total += _min_cover_size(np.flatnonzero(labels == comp_id), balls)
    return total


def _min_cover_size(members: np.ndarray, balls: np.ndarray) -> int:
    # Work on the component-induced ball matrix; position i covers position j
    # iff sub[i, j]. A center set covers the component iff the union of its
    # rows is all-true.
    sub = balls[np.ix_(members, members)]
    count = len(members)
    for size in range(1, count + 1):
        for combo in itertools.combinations(range(count), size):
            if sub[list(combo)].any(axis=0).all():
                return size
    return count


def greedy_cover(g: FilterGraph, ell: int,
                 residual_degrees: bool = False) -> tuple[list[int], int]:
    """Greedy center sequence: each center has maximal degree among the
    still-uncovered vertices; its radius-ell ball is then marked covered.

    Degrees are measured in the full graph by default; residual_degrees
    switches to the subgraph induced on the uncovered set. Ties: larger sum
    of neighbor degrees, then lower index, keeping the sequence total.
    """
    if g.n == 0:
        raise ValidationError("greedy cover on an empty graph")
    balls = ball_matrix(g, ell)
    adj64 = g.adj.astype(np.int64)
    deg = adj64.sum(axis=1)
    nbr = adj64 @ deg
    uncovered = np.ones(g.n, dtype=bool)
    centers_pos = []
    while uncovered.any():
        if residual_degrees:
            live = (g.adj & uncovered[:, None] & uncovered[None, :]).astype(np.int64)
            deg = live.sum(axis=1)
            nbr = live @ deg
        cand = np.flatnonzero(uncovered)
        order = np.lexsort((cand, -nbr[cand], -deg[cand]))
        best = int(cand[order[0]])
        centers_pos.append(best)
        uncovered &= ~balls[best]
    centers = [g.vertices[p].index for p in centers_pos]
    return centers, len(centers)


def estimate_n1c(g: FilterGraph, residual_degrees: bool = False) -> CoverEstimate:
    """Run the greedy sequence at radii 1 and 2; midpoint estimates N1c."""
    centers1, n1 = greedy_cover(g, 1, residual_degrees)
    centers2, n2 = greedy_cover(g, 2, residual_degrees)
    return CoverEstimate(n1=n1, n2=n2, centers1=tuple(centers1), centers2=tuple(centers2))
