"""Per-layer redundancy scoring and iterative budget allocation.

A layer graph with N live filters, quotient space size k (connected
components) and covering estimate c scores R = N / (w1*k + w2*c). Under the
default weights the score runs from 1 (edgeless: every filter distinct) to
N (complete: all filters interchangeable). The alternative `nof` metric is
simply the live filter count.

Allocation repeatedly removes one filter from the currently most redundant
layer, rescoring only that layer, until the filter budget is consumed or
the projected FLOPs drop first reaches its target.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import flops as flops_mod
from .covering import CoverEstimate, estimate_n1c
from .errors import InfeasibleError, ValidationError
from .filter_graph import (FilterGraph, build_layer_graph, connected_components,
                           remove_vertex)
from .weights_io import BoundModel

GRAPH_METRIC = "graph"
NOF_METRIC = "nof"
RANDOM_REMOVAL = "random"
MIN_WEIGHT_REMOVAL = "min_weight"

MAX_SEED = 2 ** 64


@dataclass(frozen=True)
class RedundancyWeights:
    w1: float = 0.35
    w2: float = 0.65

    def __post_init__(self):
        if self.w1 < 0 or self.w2 < 0:
            raise ValidationError(f"weights must be nonnegative: w1={self.w1} w2={self.w2}")
        if abs(self.w1 + self.w2 - 1.0) > 1e-12:
            raise ValidationError(f"w1 + w2 must equal 1, got {self.w1 + self.w2!r}")


@dataclass(frozen=True)
class LayerRedundancyReport:
    layer: str
    n_filters: int
    n_zero: int
    k: int
    n1: int
    n2: int
    estimate: float
    gap: int
    redundancy: float


@dataclass(frozen=True)
class AllocationStep:
    step: int
    layer: str
    vertex: int
    redundancy: float


@dataclass(frozen=True)
class FilterBudget:
    count: int

    def __post_init__(self):
        if not isinstance(self.count, int) or isinstance(self.count, bool) or self.count < 0:
            raise ValidationError(f"filter budget must be a nonnegative integer, got {self.count!r}")


@dataclass(frozen=True)
class FlopsBudget:
    fraction: float

    def __post_init__(self):
        if not 0.0 <= self.fraction < 1.0:
            raise ValidationError(f"FLOPs drop target must lie in [0,1), got {self.fraction!r}")


@dataclass(frozen=True)
class AllocationResult:
    counts: dict[str, int]
    trace: tuple[AllocationStep, ...]
    budget_kind: str          # "filter_count" or "flops_fraction"
    budget_value: float
    seed: int
    metric: str
    removal: str
    deterministic_ties: bool
    gamma: float = 0.0
    w1: float = 0.0
    w2: float = 0.0
    flops_before: int | None = None
    flops_after: int | None = None
    drop_fraction: float | None = None
    overshoot: float | None = None


def graph_redundancy(g: FilterGraph, w: RedundancyWeights,
                     cover: CoverEstimate, k: int) -> float:
    """R = N / (w1*k + w2*estimate), the structural redundancy score."""
    if g.n == 0:
        raise ValidationError("redundancy of an empty graph")
    # Grouped so that whenever k equals the estimate (both limit regimes)
    # the denominator is exact in floating point.
    denom = (w.w1 + w.w2) * k + w.w2 * (cover.estimate - k)
    return g.n / denom


def nof_redundancy(g: FilterGraph) -> float:
    if g.n == 0:
        raise ValidationError("redundancy of an empty graph")
    return float(g.n)


def _score_layer(name: str, g: FilterGraph, w: RedundancyWeights) -> LayerRedundancyReport:
    k, _ = connected_components(g)
    cover = estimate_n1c(g)
    return LayerRedundancyReport(
        layer=name,
        n_filters=g.n,
        n_zero=len(g.zero_indices()),
        k=k,
        n1=cover.n1,
        n2=cover.n2,
        estimate=cover.estimate,
        gap=cover.gap,
        redundancy=graph_redundancy(g, w, cover, k),
    )


def thread_count(requested: int | None = None) -> int:
    """Worker cap: explicit argument, else SRR_THREADS, else CPU count."""
    if requested is None:
        env = os.environ.get("SRR_THREADS")
        if env:
            try:
                requested = int(env)
            except ValueError:
                raise ValidationError(f"SRR_THREADS must be an integer, got {env!r}") from None
        else:
            requested = os.cpu_count() or 1
    return max(1, min(int(requested), 64))


def analyze_model(model: BoundModel, gamma: float,
                  w: RedundancyWeights = RedundancyWeights(),
                  threads: int | None = None) -> list[LayerRedundancyReport]:
    """One redundancy report per prunable layer, in architecture order."""
    layers = model.prunable_layers()
    workers = min(thread_count(threads), max(1, len(layers)))

    def job(arch_layer):
        g = build_layer_graph(model.tensor(arch_layer.name), gamma)
        return _score_layer(arch_layer.name, g, w)

    if workers == 1 or len(layers) <= 1:
        return [job(l) for l in layers]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, layers))


@dataclass
class _LayerState:
    name: str
    graph: FilterGraph
    floor: int
    report: LayerRedundancyReport = field(init=False)

    def rescore(self, w: RedundancyWeights, metric: str):
        report = _score_layer(self.name, self.graph, w)
        if metric == NOF_METRIC:
            report = replace(report, redundancy=nof_redundancy(self.graph))
        self.report = report

    @property
    def live(self) -> int:
        return self.graph.n


def allocate(model: BoundModel, budget, gamma: float,
             w: RedundancyWeights = RedundancyWeights(),
             metric: str = GRAPH_METRIC, removal: str = RANDOM_REMOVAL,
             seed: int = 0, deterministic_ties: bool = False) -> AllocationResult:
    """Iteratively move the budget into the most redundant layers.

    Each round scores every live prunable layer, removes one vertex from the
    max-R layer (ties: seeded uniform choice, or lowest layer index when
    deterministic_ties is set), and rescores only that layer. Stops when the
    filter budget is consumed or the projected FLOPs drop first reaches the
    target fraction (the crossing step's overshoot is reported).
    """
    if metric not in (GRAPH_METRIC, NOF_METRIC):
        raise ValidationError(f"unknown metric {metric!r}")
    if removal not in (RANDOM_REMOVAL, MIN_WEIGHT_REMOVAL):
        raise ValidationError(f"unknown removal policy {removal!r}")
    if not 0 <= int(seed) < MAX_SEED:
        raise ValidationError(f"seed must fit in 64 bits, got {seed!r}")
    if not isinstance(budget, (FilterBudget, FlopsBudget)):
        raise ValidationError(f"unknown budget {budget!r}")

    states = []
    for arch_layer in model.prunable_layers():
        g = build_layer_graph(model.tensor(arch_layer.name), gamma)
        st = _LayerState(arch_layer.name, g, arch_layer.min_filters_floor)
        st.rescore(w, metric)
        states.append(st)

    filter_mode = isinstance(budget, FilterBudget)
    if filter_mode:
        headroom = sum(max(0, s.live - s.floor) for s in states)
        if budget.count > headroom:
            raise InfeasibleError(
                f"budget of {budget.count} filters exceeds the {headroom} "
                "removable above per-layer floors")

    rng = np.random.Generator(np.random.PCG64(int(seed)))
    counts = {s.name: 0 for s in states}
    trace: list[AllocationStep] = []
    base_flops = flops_mod.model_flops(model.arch).total
    drop = 0.0

    def stop() -> bool:
        if filter_mode:
            return len(trace) >= budget.count
        return drop >= budget.fraction

    while not stop():
        candidates = [s for s in states if s.live > s.floor]
        if not candidates:
            raise InfeasibleError(
                "all prunable layers are at their floors before the budget target was met")
        best = max(s.report.redundancy for s in candidates)
        tied = [s for s in candidates if s.report.redundancy == best]
        if len(tied) == 1:
            chosen = tied[0]
        elif deterministic_ties:
            chosen = tied[0]
        else:
            chosen = tied[int(rng.integers(len(tied)))]

        pool = chosen.graph.indices
        if removal == MIN_WEIGHT_REMOVAL:
            vertex = min(pool, key=lambda i: (chosen.graph.raw_l1_of(i), i))
        else:
            vertex = pool[int(rng.integers(len(pool)))]

        trace.append(AllocationStep(step=len(trace), layer=chosen.name,
                                    vertex=vertex,
                                    redundancy=chosen.report.redundancy))
        counts[chosen.name] += 1
        chosen.graph = remove_vertex(chosen.graph, vertex)
        chosen.rescore(w, metric)
        drop = flops_mod.projected_drop_fraction(model.arch, counts)

    overshoot = None if filter_mode else drop - budget.fraction
    return AllocationResult(
        counts=counts,
        trace=tuple(trace),
        budget_kind="filter_count" if filter_mode else "flops_fraction",
        budget_value=budget.count if filter_mode else budget.fraction,
        seed=int(seed),
        metric=metric,
        removal=removal,
        deterministic_ties=deterministic_ties,
        gamma=gamma,
        w1=w.w1,
        w2=w.w2,
        flops_before=base_flops,
        flops_after=flops_mod.flops_after_removals(model.arch, counts).total,
        drop_fraction=drop,
        overshoot=overshoot,
    )
