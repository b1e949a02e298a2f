"""Figure rendering for the report-producing commands.

Every chart is written to a file next to the JSON/CSV output; nothing is
ever shown interactively, so the non-GUI backend is forced before pyplot
is imported.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def save_redundancy_chart(reports, path) -> None:
    """Horizontal bars, most redundant layer at the top."""
    ordered = sorted(reports, key=lambda r: r.redundancy)
    names = [r.layer for r in ordered]
    scores = [r.redundancy for r in ordered]
    fig, ax = plt.subplots(figsize=(7, max(2.0, 0.4 * len(ordered) + 1.2)))
    ax.barh(names, scores, color="#4878a8")
    ax.set_xlabel("redundancy R")
    ax.set_title("Per-layer structural redundancy")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_bench_chart(rows, path) -> None:
    """Oracle vs estimate times per covering-number bin, log scale."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    sizes = sorted({r.size for r in rows})
    for size in sizes:
        cells = sorted((r for r in rows if r.size == size), key=lambda r: r.cover)
        bins = [r.cover for r in cells]
        est = [r.estimate_seconds for r in cells]
        ax.plot(bins, est, marker="o", label=f"estimate, N={size}")
        orc_bins = [r.cover for r in cells if r.oracle_seconds is not None]
        orc = [r.oracle_seconds for r in cells if r.oracle_seconds is not None]
        if orc:
            ax.plot(orc_bins, orc, marker="s", linestyle="--", label=f"oracle, N={size}")
    ax.set_yscale("log")
    ax.set_xlabel("1-covering number")
    ax.set_ylabel("seconds per graph")
    ax.set_title("Covering number: oracle vs greedy estimate")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_sweep_chart(rows, path) -> None:
    """Gap between the original and randomly pruned systems as n grows."""
    ns = [r.n for r in rows]
    gaps = [r.gap for r in rows]
    hws = [r.gap_half_width for r in rows]
    fig, ax = plt.subplots(figsize=(6.5, 4.2))
    ax.errorbar(ns, gaps, yerr=hws, marker="o", capsize=4)
    ax.set_xscale("log", base=2)
    ax.set_xlabel("wide-layer filter count n")
    ax.set_ylabel("p_o - p_eta_r")
    ax.set_title("Cost of pruning one random filter vs layer width")
    ax.axhline(0.0, color="gray", linewidth=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
