"""Figures for sweep and evaluation reports."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "figure.figsize": (5.0, 3.4),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 9,
    "legend.fontsize": 8,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}


def _ok(rows):
    return [r for r in rows if r.get("status", "ok") == "ok"]


def _series(rows, key, x, y):
    out = defaultdict(list)
    for r in _ok(rows):
        out[r[key]].append((float(r[x]), float(r[y])))
    return {k: sorted(v) for k, v in sorted(out.items())}


def clusters_vs_beta(rows, path) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for topics, pts in _series(rows, "topics", "beta", "num_clusters").items():
            ax.plot(*zip(*pts), marker="o", label=f"{topics} topics")
        ax.set_xlabel("decay factor $\\beta$")
        ax.set_ylabel("clusters formed")
        ax.legend()
        fig.savefig(path)
        plt.close(fig)
    return Path(path)


def clusters_vs_topics(rows, path) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for beta, pts in _series(rows, "beta", "topics", "num_clusters").items():
            ax.plot(*zip(*pts), marker="s", label=f"$\\beta$ = {beta:g}")
        ax.set_xlabel("LSI topics")
        ax.set_ylabel("clusters formed")
        ax.legend()
        fig.savefig(path)
        plt.close(fig)
    return Path(path)


def fmeasure_comparison(rows, path) -> Path:
    """F-measure against cluster count, one line per method."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for method, pts in _series(rows, "method", "k", "f_measure").items():
            ax.plot(*zip(*pts), marker="o", label=method)
        ax.set_xscale("log")
        ax.set_xlabel("number of clusters")
        ax.set_ylabel("F-measure")
        ax.set_ylim(0, 1)
        ax.legend()
        fig.savefig(path)
        plt.close(fig)
    return Path(path)


def sweep_figures(rows, outdir) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    return [clusters_vs_beta(rows, outdir / "clusters_vs_beta.png"),
            clusters_vs_topics(rows, outdir / "clusters_vs_topics.png")]
