"""Deterministic FLOPs accounting for architectures and pruning plans.

Convention: one multiply and one add per MAC, so a conv layer costs
2 * out * in * kh * kw * H_out * W_out. Bias, batch-norm, and activation
costs are excluded. Drop fractions are invariant to the factor-2 choice.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import ValidationError
from .weights_io import ArchLayer, ArchSpec


@dataclass(frozen=True)
class FlopsReport:
    per_layer: dict[str, int]
    total: int
    base_total: int | None = None
    drop_fraction: float | None = None


def conv_flops(out_channels: int, in_channels: int, kh: int, kw: int,
               out_h: int, out_w: int) -> int:
    return 2 * out_channels * in_channels * kh * kw * out_h * out_w


def layer_flops(layer: ArchLayer) -> int:
    return conv_flops(layer.out_channels, layer.in_channels, layer.kh, layer.kw,
                      layer.out_h, layer.out_w)


def model_flops(arch: ArchSpec) -> FlopsReport:
    per_layer = {l.name: layer_flops(l) for l in arch}
    return FlopsReport(per_layer=per_layer, total=sum(per_layer.values()))


def live_channel_counts(arch: ArchSpec,
                        removed: Mapping[str, int]) -> tuple[dict[str, int], dict[str, int]]:
    """Out/in channel counts after removing `removed[name]` filters per layer.

    A consumer's in count is the sum of its inputs' live out counts;
    externally fed layers keep their declared in_channels.
    """
    for name, count in removed.items():
        try:
            layer = arch.layer(name)
        except KeyError:
            raise ValidationError(
                f"removal names layer {name!r} absent from the architecture") from None
        if not 0 <= count <= layer.out_channels:
            raise ValidationError(
                f"cannot remove {count} of {layer.out_channels} filters from {name!r}")
    out = {l.name: l.out_channels - removed.get(l.name, 0) for l in arch}
    inc = {l.name: sum(out[s] for s in l.inputs) if l.inputs else l.in_channels
           for l in arch}
    return out, inc


def flops_after_removals(arch: ArchSpec, removed: Mapping[str, int]) -> FlopsReport:
    out, inc = live_channel_counts(arch, removed)
    per_layer = {l.name: conv_flops(out[l.name], inc[l.name], l.kh, l.kw,
                                    l.out_h, l.out_w)
                 for l in arch}
    total = sum(per_layer.values())
    base = model_flops(arch).total
    drop = 1.0 - total / base if base else 0.0
    return FlopsReport(per_layer=per_layer, total=total, base_total=base,
                       drop_fraction=drop)


def projected_drop_fraction(arch: ArchSpec, removed: Mapping[str, int]) -> float:
    return flops_after_removals(arch, removed).drop_fraction


def plan_flops_drop(arch: ArchSpec, plan) -> FlopsReport:
    """FLOPs report for a pruning plan (anything exposing `removals`)."""
    removals = plan.removals if hasattr(plan, "removals") else plan
    counts = {name: len(indices) for name, indices in removals.items()}
    return flops_after_removals(arch, counts)
