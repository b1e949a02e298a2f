"""Generate the checked-in fixtures under fixtures/.

toy3: a 3-conv chain whose filter graphs are constructed geometrically so
the redundancy numbers are known by hand:
  conv1  8 filters clustered on a tiny sphere cap -> complete graph,
         k=1, n1=n2=1, R = 8
  conv2  5 filters walked along a great circle so only consecutive pairs
         fall inside the threshold -> path graph, k=1, n1=3, n2=1, R = 5/1.65
  conv3  6 well-separated filters -> edgeless graph, k=6, R = 1
Raw magnitudes are distinct so min-weight rankings are deterministic.
"""
import json
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from srrplan.weights_io import (LayerTensor, ModelWeights, arch_from_dict,
                                write_arch, write_weights)  # noqa: E402

GAMMA = 0.034
FIXDIR = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def _unit(v):
    return v / np.linalg.norm(v)


def cluster_filters(count, dim, rng):
    """Points on a small cap around a base direction: complete graph."""
    base = _unit(rng.normal(size=dim))
    # pairwise chord must stay well under gamma*sqrt(dim)
    spread = 0.15 * GAMMA * np.sqrt(dim)
    points = [_unit(base + spread * rng.normal(size=dim) / np.sqrt(dim))
              for _ in range(count)]
    return np.stack(points)

def path_filters(count, dim, rng):
    """Walk along a great circle: consecutive chords just inside the
    threshold, everything farther apart well outside it."""
    base = _unit(rng.normal(size=dim))
    other = rng.normal(size=dim)
    other = _unit(other - np.dot(other, base) * base)
    chord = 0.9 * GAMMA * np.sqrt(dim)
    step = 2.0 * np.arcsin(chord / 2.0)
    return np.stack([np.cos(i * step) * base + np.sin(i * step) * other
                     for i in range(count)])


def separated_filters(count, dim):
    """Standard basis plus the diagonal: all pairs far apart."""
    assert count == dim + 1
    points = [np.eye(dim)[i] for i in range(dim)]
    points.append(_unit(np.ones(dim)))
    return np.stack(points)


def scale_to_raw(units, lo=0.5, step=0.25):
    # distinct L1 magnitudes, ascending with filter index
    scales = lo + step * np.arange(len(units))
    return (units * scales[:, None]).astype(np.float32)


def make_toy3():
    rng = np.random.default_rng(20260815)
    conv1 = scale_to_raw(cluster_filters(8, 3 * 9, rng)).reshape(8, 3, 3, 3)
    conv2 = scale_to_raw(path_filters(5, 8 * 9, rng)).reshape(5, 8, 3, 3)
    conv3 = scale_to_raw(separated_filters(6, 5)).reshape(6, 5, 1, 1)
    weights = ModelWeights((
        LayerTensor("conv1", 8, 3, 3, 3, conv1),
        LayerTensor("conv2", 5, 8, 3, 3, conv2),
        LayerTensor("conv3", 6, 5, 1, 1, conv3),
    ))
    arch = arch_from_dict({"layers": [
        {"name": "conv1", "in_channels": 3, "out_channels": 8, "kh": 3, "kw": 3,
         "out_h": 16, "out_w": 16, "inputs": [], "prunable": True,
         "min_filters_floor": 1},
        {"name": "conv2", "in_channels": 8, "out_channels": 5, "kh": 3, "kw": 3,
         "out_h": 8, "out_w": 8, "inputs": ["conv1"], "prunable": True,
         "min_filters_floor": 1},
        {"name": "conv3", "in_channels": 5, "out_channels": 6, "kh": 1, "kw": 1,
         "out_h": 8, "out_w": 8, "inputs": ["conv2"], "prunable": True,
         "min_filters_floor": 1},
    ]})
    return weights, arch


def check_and_golden(weights, arch):
    from srrplan.redundancy import RedundancyWeights, analyze_model
    from srrplan.weights_io import bind

    reports = analyze_model(bind(weights, arch), GAMMA, RedundancyWeights())
    by_name = {r.layer: r for r in reports}
    expect = {
        "conv1": dict(n_filters=8, k=1, n1=1, n2=1),
        "conv2": dict(n_filters=5, k=1, n1=3, n2=1),
        "conv3": dict(n_filters=6, k=6, n1=6, n2=6),
    }
    for name, want in expect.items():
        got = by_name[name]
        for field, value in want.items():
            assert getattr(got, field) == value, (name, field, got)
    golden = {
        "gamma": GAMMA, "w1": 0.35, "w2": 0.65,
        "layers": [{
            "layer": r.layer, "n_filters": r.n_filters, "n_zero": r.n_zero,
            "k": r.k, "n1": r.n1, "n2": r.n2, "gap": r.gap,
            "estimate": r.estimate, "redundancy": r.redundancy,
        } for r in sorted(reports, key=lambda r: -r.redundancy)],
    }
    return golden


def make_simulate_configs():
    exp = {
        "m": 8, "n": 512,
        "dist_xi": {"kind": "exponential", "rate": 1.0},
        "dist_eta": {"kind": "exponential", "rate": 1.0},
        "a": 12.0, "b": 256.0, "trials": 100000, "seed": 7,
    }
    sweep = {
        "m": 8, "n": 512,
        "dist_xi": {"kind": "exponential", "rate": 1.0},
        "dist_eta": {"kind": "exponential", "rate": 1.0},
        "a": 12.0, "b": 128.0, "trials": 40000, "seed": 11,
        "sweep": {"n_values": [32, 128, 512], "b_per_n": 0.5},
    }
    saturated = {
        "m": 4, "n": 100,
        "dist_xi": {"kind": "constant", "value": 1.0},
        "dist_eta": {"kind": "constant", "value": 1.0},
        "a": 2.0, "b": 50.0, "trials": 1000, "seed": 3,
    }
    return {"simulate_exp.json": exp, "simulate_sweep.json": sweep,
            "simulate_saturated.json": saturated}


def main():
    os.makedirs(FIXDIR, exist_ok=True)
    weights, arch = make_toy3()
    write_weights(weights, os.path.join(FIXDIR, "toy3.nrpw"))
    write_arch(arch, os.path.join(FIXDIR, "toy3_arch.json"))
    golden = check_and_golden(weights, arch)
    with open(os.path.join(FIXDIR, "toy3_analyze_golden.json"), "w",
              encoding="utf-8") as fh:
        json.dump(golden, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for name, doc in make_simulate_configs().items():
        with open(os.path.join(FIXDIR, name), "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    for row in golden["layers"]:
        print(f"{row['layer']}: k={row['k']} n1={row['n1']} n2={row['n2']} "
              f"R={row['redundancy']:.6f}")
    print("fixtures written to", FIXDIR)


if __name__ == "__main__":
    main()
