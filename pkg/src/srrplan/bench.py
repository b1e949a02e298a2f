"""Timing harness: exact covering oracle vs the greedy estimate.

Graphs are generated per target covering number (chained hubs with leaf
cliques, so the 1-covering number is known exactly), realized as unit
vectors, and rebuilt through the ordinary graph construction before timing.
The oracle must scan every smaller center cardinality before it can certify
the answer, so its cost explodes with the covering number while the greedy
estimate stays flat.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .covering import covering_oracle, estimate_n1c
from .errors import ValidationError
from .graphgen import hub_chain_adjacency, realized_graph

DEFAULT_ORACLE_CAP = 192


@dataclass(frozen=True)
class BenchRow:
    size: int
    cover: int                # target (and verified) 1-covering number
    graphs: int
    estimate_seconds: float   # mean per graph
    oracle_seconds: float | None  # None when the size exceeds the oracle cap
    estimate_values: tuple[float, ...]
    oracle_values: tuple[int, ...]


def bench_covering(sizes, bins, graphs_per_bin: int = 3, seed: int = 0,
                   oracle_cap: int | None = DEFAULT_ORACLE_CAP) -> list[BenchRow]:
    """One row per (size, covering-number bin), timing both solvers."""
    if graphs_per_bin < 1:
        raise ValidationError(f"graphs_per_bin must be positive, got {graphs_per_bin}")
    rows = []
    for size in sizes:
        for cover in bins:
            if size < 3 * cover:
                raise ValidationError(
                    f"size {size} too small for covering number {cover}")
            rng = np.random.Generator(np.random.PCG64(
                np.random.SeedSequence([int(seed), int(size), int(cover)])))
            est_times, est_values = [], []
            orc_times, orc_values = [], []
            run_oracle = oracle_cap is None or size <= oracle_cap
            for _ in range(graphs_per_bin):
                g = realized_graph(hub_chain_adjacency(size, cover, rng))
                t0 = time.perf_counter()
                est = estimate_n1c(g)
                est_times.append(time.perf_counter() - t0)
                est_values.append(est.estimate)
                if run_oracle:
                    t0 = time.perf_counter()
                    exact = covering_oracle(g, 1, max_vertices=None)
                    orc_times.append(time.perf_counter() - t0)
                    orc_values.append(exact)
            rows.append(BenchRow(
                size=int(size),
                cover=int(cover),
                graphs=graphs_per_bin,
                estimate_seconds=sum(est_times) / len(est_times),
                oracle_seconds=(sum(orc_times) / len(orc_times)) if run_oracle else None,
                estimate_values=tuple(est_values),
                oracle_values=tuple(orc_values),
            ))
    return rows
