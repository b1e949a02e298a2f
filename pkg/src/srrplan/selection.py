"""Filter ranking, plan materialization, and plan application.

Filters are ranked separately within each layer, never across layers: the
allocation loop decides how many filters each layer loses, the criterion
here decides which ones. Applying a plan deletes the listed out-channel
slices and the matching in-channel slices of every consumer, leaving all
surviving values bit-identical.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, PlanMismatchError, ValidationError
from .filter_graph import ZERO_NORM_EPS
from .redundancy import AllocationResult
from .weights_io import (ArchLayer, ArchSpec, BoundModel, LayerTensor,
                         ModelWeights)

MIN_WEIGHT = "min_weight"
RANDOM = "random"
L1 = "l1"
L2 = "l2"


@dataclass(frozen=True)
class PruningPlan:
    """Per-layer ascending filter-index removal lists plus provenance."""

    removals: dict[str, tuple[int, ...]]
    criterion: str
    gamma: float
    w1: float
    w2: float
    seed: int
    metric: str
    removal: str
    budget_kind: str
    budget_value: float

    def __post_init__(self):
        for name, indices in self.removals.items():
            if list(indices) != sorted(set(indices)):
                raise ValidationError(
                    f"plan for layer {name!r} must list unique ascending indices")
            if indices and indices[0] < 0:
                raise ValidationError(f"plan for layer {name!r} has a negative index")


def rank_filters_min_weight(layer: LayerTensor, norm: str = L1) -> list[int]:
    """Indices by ascending filter norm; zero filters first; ties by index."""
    mat = layer.filters().astype(np.float64)
    if norm == L1:
        weight = np.abs(mat).sum(axis=1)
    elif norm == L2:
        weight = np.linalg.norm(mat, axis=1)
    else:
        raise ValidationError(f"unknown norm {norm!r}")
    zero = np.linalg.norm(mat, axis=1) < ZERO_NORM_EPS
    order = sorted(range(layer.out_channels),
                   key=lambda i: (not zero[i], weight[i], i))
    return order


def rank_filters_random(layer: LayerTensor, seed: int) -> list[int]:
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    return [int(i) for i in rng.permutation(layer.out_channels)]


def make_plan(alloc: AllocationResult, model: BoundModel, criterion: str,
              seed: int, norm: str = L1) -> PruningPlan:
    """Materialize per-layer removal lists from allocation counts.

    Each layer's list is the first `count` entries of its own ranking,
    stored ascending. Random rankings draw from independent per-layer
    substreams of the seed, so layer order never shifts another layer's picks.
    """
    if criterion not in (MIN_WEIGHT, RANDOM):
        raise ValidationError(f"unknown criterion {criterion!r}")
    removals: dict[str, tuple[int, ...]] = {}
    arch_layers = list(model.arch)
    for pos, arch_layer in enumerate(arch_layers):
        count = alloc.counts.get(arch_layer.name, 0)
        if count == 0:
            continue
        tensor = model.tensor(arch_layer.name)
        if count > tensor.out_channels - arch_layer.min_filters_floor:
            raise ValidationError(
                f"cannot remove {count} filters from {arch_layer.name!r}: only "
                f"{tensor.out_channels - arch_layer.min_filters_floor} sit above the floor")
        if criterion == MIN_WEIGHT:
            ranking = rank_filters_min_weight(tensor, norm)
        else:
            sub = np.random.SeedSequence([int(seed), pos]).generate_state(1)[0]
            ranking = rank_filters_random(tensor, int(sub))
        removals[arch_layer.name] = tuple(sorted(ranking[:count]))
    unknown = set(alloc.counts) - {l.name for l in arch_layers}
    if unknown:
        raise ValidationError(f"allocation names unknown layers: {sorted(unknown)}")
    return PruningPlan(
        removals=removals,
        criterion=criterion,
        gamma=alloc.gamma,
        w1=alloc.w1,
        w2=alloc.w2,
        seed=int(seed),
        metric=alloc.metric,
        removal=alloc.removal,
        budget_kind=alloc.budget_kind,
        budget_value=alloc.budget_value,
    )


def apply_plan(model: BoundModel, plan: PruningPlan) -> tuple[ModelWeights, ArchSpec]:
    """Delete planned out-channels and the mirrored consumer in-channels."""
    _validate_plan(model, plan)
    arch = model.arch
    kept_out = {}
    for layer in arch:
        removed = set(plan.removals.get(layer.name, ()))
        kept_out[layer.name] = [i for i in range(layer.out_channels) if i not in removed]

    new_tensors = []
    arch_names = {l.name for l in arch}
    for tensor in model.weights:
        if tensor.name not in arch_names:
            new_tensors.append(tensor)  # unreferenced by the architecture; untouched
            continue
        layer = arch.layer(tensor.name)
        keep_o = kept_out[tensor.name]
        keep_i = _kept_in_channels(arch, layer, kept_out)
        vals = tensor.values.reshape(tensor.out_channels, tensor.in_channels,
                                     tensor.kh, tensor.kw)
        vals = vals[np.ix_(keep_o, keep_i)]
        new_tensors.append(LayerTensor(tensor.name, len(keep_o), len(keep_i),
                                       tensor.kh, tensor.kw,
                                       np.ascontiguousarray(vals).reshape(-1)))
    new_weights = ModelWeights(tuple(new_tensors))

    new_layers = []
    for layer in arch:
        keep_i = _kept_in_channels(arch, layer, kept_out)
        new_layers.append(ArchLayer(
            name=layer.name,
            in_channels=len(keep_i),
            out_channels=len(kept_out[layer.name]),
            kh=layer.kh, kw=layer.kw, out_h=layer.out_h, out_w=layer.out_w,
            inputs=layer.inputs,
            prunable=layer.prunable,
            coupling_group=layer.coupling_group,
            min_filters_floor=layer.min_filters_floor,
        ))
    return new_weights, ArchSpec(tuple(new_layers))


def _kept_in_channels(arch: ArchSpec, layer: ArchLayer,
                      kept_out: dict[str, list[int]]) -> list[int]:
    """Surviving in-channel positions; inputs occupy contiguous blocks."""
    if not layer.inputs:
        return list(range(layer.in_channels))
    kept = []
    offset = 0
    for src in layer.inputs:
        src_layer = arch.layer(src)
        kept.extend(offset + i for i in kept_out[src])
        offset += src_layer.out_channels
    return kept


def _validate_plan(model: BoundModel, plan: PruningPlan) -> None:
    arch = model.arch
    arch_names = {l.name for l in arch}
    for name, indices in plan.removals.items():
        if name not in arch_names:
            raise PlanMismatchError(f"plan names unknown layer {name!r}")
        tensor = model.tensor(name)
        for i in indices:
            if not 0 <= i < tensor.out_channels:
                raise PlanMismatchError(
                    f"plan removes filter {i} of layer {name!r}, which has "
                    f"{tensor.out_channels} filters")
    # A coupled group must be pruned identically or left alone.
    groups: dict[str, list[str]] = {}
    for layer in arch:
        if layer.coupling_group is not None:
            groups.setdefault(layer.coupling_group, []).append(layer.name)
    for group, members in groups.items():
        sets = {name: tuple(plan.removals.get(name, ())) for name in members}
        touched = {name for name, s in sets.items() if s}
        if touched and len(set(sets.values())) != 1:
            raise PlanMismatchError(
                f"coupling group {group!r} must be pruned identically across "
                f"{sorted(members)}; got differing removal sets")


def plan_to_dict(plan: PruningPlan) -> dict:
    return {
        "criterion": plan.criterion,
        "gamma": plan.gamma,
        "w1": plan.w1,
        "w2": plan.w2,
        "seed": plan.seed,
        "metric": plan.metric,
        "removal": plan.removal,
        "budget": {"kind": plan.budget_kind, "value": plan.budget_value},
        "removals": {name: list(ix) for name, ix in sorted(plan.removals.items())},
    }


def plan_from_dict(doc: dict) -> PruningPlan:
    try:
        return PruningPlan(
            removals={name: tuple(int(i) for i in ix)
                      for name, ix in doc["removals"].items()},
            criterion=doc["criterion"],
            gamma=doc["gamma"],
            w1=doc["w1"],
            w2=doc["w2"],
            seed=doc["seed"],
            metric=doc["metric"],
            removal=doc["removal"],
            budget_kind=doc["budget"]["kind"],
            budget_value=doc["budget"]["value"],
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise ParseError(f"malformed plan document: {exc!r}") from exc


def load_plan(path) -> PruningPlan:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read plan {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed plan JSON in {path}: {exc}") from exc
    return plan_from_dict(doc)
