"""Command-line front end.

Human-readable tables go to standard output; machine-readable JSON, CSV,
and rendered figures go to files under --out. Exit codes: 0 success,
1 failed hard ordering check in simulate, 2 parse error, 3 validation
error, 4 infeasible budget or plan/model mismatch.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from . import bench as bench_mod
from . import flops as flops_mod
from . import plotting, statmodel
from .errors import InfeasibleError, ParseError, PlanMismatchError, ValidationError
from .redundancy import (GRAPH_METRIC, MIN_WEIGHT_REMOVAL, NOF_METRIC,
                         RANDOM_REMOVAL, FilterBudget, FlopsBudget,
                         RedundancyWeights, allocate, analyze_model)
from .selection import (MIN_WEIGHT, RANDOM, apply_plan, load_plan, make_plan,
                        plan_to_dict)
from .weights_io import (arch_from_weights, arch_to_dict, bind, load_arch,
                         load_weights, write_arch, write_weights)

GAMMA_DEFAULT = 0.034
W1_DEFAULT = 0.35
W2_DEFAULT = 0.65


def _write_json(path: str, doc) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _outdir(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _load_model(args):
    weights = load_weights(args.weights)
    if getattr(args, "arch", None):
        arch = load_arch(args.arch)
    else:
        arch = arch_from_weights(weights)
    return bind(weights, arch)


def cmd_analyze(args) -> int:
    model = _load_model(args)
    w = RedundancyWeights(args.w1, args.w2)
    reports = sorted(analyze_model(model, args.gamma, w),
                     key=lambda r: -r.redundancy)
    name_width = max([len(r.layer) for r in reports] + [5])
    print(f"{'layer':<{name_width}} {'N':>5} {'zero':>4} {'k':>5} "
          f"{'n1':>5} {'n2':>5} {'gap':>4} {'~N1c':>7} {'R':>10}")
    for r in reports:
        print(f"{r.layer:<{name_width}} {r.n_filters:>5} {r.n_zero:>4} {r.k:>5} "
              f"{r.n1:>5} {r.n2:>5} {r.gap:>4} {r.estimate:>7.1f} {r.redundancy:>10.4f}")

    out = _outdir(args)
    doc = {
        "gamma": args.gamma, "w1": args.w1, "w2": args.w2,
        "layers": [{
            "layer": r.layer, "n_filters": r.n_filters, "n_zero": r.n_zero,
            "k": r.k, "n1": r.n1, "n2": r.n2, "gap": r.gap,
            "estimate": r.estimate, "redundancy": r.redundancy,
        } for r in reports],
    }
    _write_json(os.path.join(out, "analyze.json"), doc)
    _write_csv(os.path.join(out, "analyze.csv"),
               ["layer", "n_filters", "n_zero", "k", "n1", "n2", "gap",
                "estimate", "redundancy"],
               [[r.layer, r.n_filters, r.n_zero, r.k, r.n1, r.n2, r.gap,
                 r.estimate, r.redundancy] for r in reports])
    plotting.save_redundancy_chart(reports, os.path.join(out, "redundancy.png"))
    print(f"wrote analyze.json, analyze.csv, redundancy.png to {out}")
    return 0


_METRICS = {"graph": GRAPH_METRIC, "nof": NOF_METRIC}
_REMOVALS = {"random": RANDOM_REMOVAL, "min-weight": MIN_WEIGHT_REMOVAL}
_CRITERIA = {"mw": MIN_WEIGHT, "random": RANDOM}


def cmd_plan(args) -> int:
    model = _load_model(args)
    w = RedundancyWeights(args.w1, args.w2)
    if args.filters is not None:
        budget = FilterBudget(args.filters)
    else:
        budget = FlopsBudget(args.flops_drop)
    alloc = allocate(model, budget, args.gamma, w,
                     metric=_METRICS[args.metric],
                     removal=_REMOVALS[args.removal],
                     seed=args.seed,
                     deterministic_ties=args.deterministic_ties)
    plan = make_plan(alloc, model, _CRITERIA[args.criterion], args.seed)
    report = flops_mod.plan_flops_drop(model.arch, plan)

    out = _outdir(args)
    _write_json(os.path.join(out, "plan.json"), plan_to_dict(plan))
    _write_json(os.path.join(out, "allocation.json"), {
        "budget": {"kind": alloc.budget_kind, "value": alloc.budget_value},
        "counts": {k: v for k, v in sorted(alloc.counts.items())},
        "gamma": alloc.gamma, "w1": alloc.w1, "w2": alloc.w2,
        "metric": alloc.metric, "removal": alloc.removal,
        "seed": alloc.seed, "deterministic_ties": alloc.deterministic_ties,
        "flops": {"before": alloc.flops_before, "after": alloc.flops_after,
                  "drop_fraction": alloc.drop_fraction,
                  "overshoot": alloc.overshoot},
        "trace": [{"step": s.step, "layer": s.layer, "vertex": s.vertex,
                   "redundancy": s.redundancy} for s in alloc.trace],
    })
    _write_json(os.path.join(out, "flops.json"), {
        "per_layer": report.per_layer, "total": report.total,
        "base_total": report.base_total, "drop_fraction": report.drop_fraction,
    })

    print(f"seed: {alloc.seed}")
    print(f"{'layer':<24} {'removed':>8}")
    for name, count in sorted(alloc.counts.items()):
        if count:
            print(f"{name:<24} {count:>8}")
    print(f"filters removed: {sum(alloc.counts.values())}")
    print(f"projected FLOPs drop: {report.drop_fraction:.4f}"
          + (f" (overshoot {alloc.overshoot:.4f})" if alloc.overshoot else ""))
    print(f"wrote plan.json, allocation.json, flops.json to {out}")
    return 0


def cmd_apply(args) -> int:
    model = _load_model(args)
    plan = load_plan(args.plan)
    new_weights, new_arch = apply_plan(model, plan)
    out = _outdir(args)
    weights_path = os.path.join(out, "pruned.nrpw")
    arch_path = os.path.join(out, "pruned_arch.json")
    write_weights(new_weights, weights_path)
    write_arch(new_arch, arch_path)
    for layer in model.arch:
        before = layer.out_channels
        after = new_arch.layer(layer.name).out_channels
        if before != after:
            print(f"{layer.name}: {before} -> {after} filters")
    print(f"wrote {weights_path} and {arch_path}")
    return 0


def cmd_simulate(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read config {args.config}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed config JSON in {args.config}: {exc}") from exc
    config, sweep = statmodel.parse_config(doc)
    est = statmodel.simulate_system(config)
    checks = statmodel.verify_ordering(est)

    print(f"{'estimate':<12} {'value':>10} {'99% hw':>10}")
    for name, e in [("p_o", est.p_o), ("p_eta_r", est.p_eta_r),
                    ("p_eta_min", est.p_eta_min), ("p_xi_min", est.p_xi_min),
                    ("p_g", est.p_g)]:
        print(f"{name:<12} {e.value:>10.6f} {e.half_width:>10.6f}")
    hard_failed = False
    for check in checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"[{status}] ({check.kind}) {check.name}: {check.detail}")
        if check.kind == "hard" and not check.passed:
            hard_failed = True

    out = _outdir(args)
    doc_out = {
        "config": doc,
        "estimates": {name: {"value": e.value, "half_width_99": e.half_width}
                      for name, e in [("p_o", est.p_o), ("p_eta_r", est.p_eta_r),
                                      ("p_eta_min", est.p_eta_min),
                                      ("p_xi_min", est.p_xi_min), ("p_g", est.p_g)]},
        "trials": est.trials, "seed": est.seed, "m": est.m, "n": est.n,
        "assumptions": {
            "xi_mean": config.dist_xi.mean(), "xi_variance": config.dist_xi.variance(),
            "eta_mean": config.dist_eta.mean(), "eta_variance": config.dist_eta.variance(),
        },
        "ordering": [{"name": c.name, "kind": c.kind, "passed": c.passed,
                      "detail": c.detail} for c in checks],
    }
    if sweep is not None:
        rows = statmodel.convergence_sweep(config, sweep.n_values, sweep.b_per_n)
        doc_out["sweep"] = [{"n": r.n, "b": r.b, "p_o": r.p_o,
                             "p_eta_r": r.p_eta_r, "gap": r.gap,
                             "eta_gap": r.eta_gap,
                             "gap_half_width": r.gap_half_width} for r in rows]
        _write_csv(os.path.join(out, "sweep.csv"),
                   ["n", "b", "p_o", "p_eta_r", "gap", "eta_gap", "gap_half_width"],
                   [[r.n, r.b, r.p_o, r.p_eta_r, r.gap, r.eta_gap,
                     r.gap_half_width] for r in rows])
        plotting.save_sweep_chart(rows, os.path.join(out, "sweep.png"))
        for r in rows:
            print(f"n={r.n:<6} b={r.b:<10.4g} p_o-p_eta_r={r.gap:.6f} "
                  f"(hw {r.gap_half_width:.6f})")
    _write_json(os.path.join(out, "estimates.json"), doc_out)
    print(f"wrote estimates.json to {out}")
    return 1 if hard_failed else 0


def cmd_bench_cover(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s]
    bins = [int(b) for b in args.bins.split(",") if b]
    rows = bench_mod.bench_covering(sizes, bins, args.graphs_per_bin,
                                    seed=args.seed, oracle_cap=args.oracle_cap)
    print(f"{'N':>5} {'N1c':>4} {'graphs':>6} {'estimate s':>12} {'oracle s':>12}")
    for r in rows:
        oracle = f"{r.oracle_seconds:.6f}" if r.oracle_seconds is not None else "guarded"
        print(f"{r.size:>5} {r.cover:>4} {r.graphs:>6} "
              f"{r.estimate_seconds:>12.6f} {oracle:>12}")

    out = _outdir(args)
    _write_json(os.path.join(out, "bench.json"), {
        "seed": args.seed, "graphs_per_bin": args.graphs_per_bin,
        "oracle_cap": args.oracle_cap,
        "rows": [{"size": r.size, "cover": r.cover, "graphs": r.graphs,
                  "estimate_seconds": r.estimate_seconds,
                  "oracle_seconds": r.oracle_seconds,
                  "estimate_values": list(r.estimate_values),
                  "oracle_values": list(r.oracle_values)} for r in rows],
    })
    _write_csv(os.path.join(out, "bench.csv"),
               ["size", "cover", "graphs", "estimate_seconds", "oracle_seconds"],
               [[r.size, r.cover, r.graphs, r.estimate_seconds,
                 r.oracle_seconds if r.oracle_seconds is not None else ""]
                for r in rows])
    plotting.save_bench_chart(rows, os.path.join(out, "bench.png"))
    print(f"wrote bench.json, bench.csv, bench.png to {out}")
    return 0


def _add_graph_flags(sp) -> None:
    sp.add_argument("--gamma", type=float, default=GAMMA_DEFAULT,
                    help="edge threshold on normalized filter distance")
    sp.add_argument("--w1", type=float, default=W1_DEFAULT,
                    help="weight of the quotient space size")
    sp.add_argument("--w2", type=float, default=W2_DEFAULT,
                    help="weight of the covering number estimate")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="srrplan",
        description="Structural-redundancy pruning planner for CNN weights")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="score per-layer redundancy")
    p.add_argument("weights", help=".nrpw weights file")
    p.add_argument("--arch", help="architecture JSON (optional)")
    _add_graph_flags(p)
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("plan", help="allocate a pruning budget and emit a plan")
    p.add_argument("weights", help=".nrpw weights file")
    p.add_argument("--arch", required=True, help="architecture JSON")
    _add_graph_flags(p)
    budget = p.add_mutually_exclusive_group(required=True)
    budget.add_argument("--filters", type=int, help="total filters to remove")
    budget.add_argument("--flops-drop", type=float, dest="flops_drop",
                        help="target FLOPs drop fraction in [0,1)")
    p.add_argument("--metric", choices=sorted(_METRICS), default="graph")
    p.add_argument("--criterion", choices=sorted(_CRITERIA), default="mw")
    p.add_argument("--removal", choices=sorted(_REMOVALS), default="random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--deterministic-ties", action="store_true",
                   help="break layer ties by lowest index instead of seeded draw")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("apply", help="apply a plan to produce slimmed weights")
    p.add_argument("weights", help=".nrpw weights file")
    p.add_argument("--arch", required=True, help="architecture JSON")
    p.add_argument("--plan", required=True, help="plan.json from the plan command")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("simulate", help="Monte Carlo pruning-performance model")
    p.add_argument("config", help="simulation config JSON")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench-cover", help="time the covering oracle vs the estimate")
    p.add_argument("--sizes", default="64", help="comma-separated graph sizes")
    p.add_argument("--bins", default="1,2,3,4",
                   help="comma-separated target covering numbers")
    p.add_argument("--graphs-per-bin", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle-cap", type=int, default=bench_mod.DEFAULT_ORACLE_CAP,
                   help="largest graph the oracle is attempted on")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_bench_cover)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 3
    except (InfeasibleError, PlanMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
