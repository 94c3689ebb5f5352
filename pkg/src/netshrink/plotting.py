"""Render the standard comparison figures next to the delimited output.

Figures are a convenience view of the text files the CLI already writes;
everything here is re-creatable from those files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .analysis import NormalizedSamples, ccdf
from .metrics import DegreeCurve, DistanceDistribution


def plot_degree_curves(curves: dict, ylabel: str, path: str | Path,
                       loglog: bool = True) -> None:
    """Overlay degree curves (label -> DegreeCurve) on one axes."""
    fig, ax = plt.subplots(figsize=(5, 3.6))
    for label, curve in curves.items():
        mask = curve.count > 0
        ax.plot(curve.x[mask], curve.mean[mask], marker="o", ms=4, label=label)
    if loglog:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel("degree")
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_distance_distributions(dists: dict, path: str | Path) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.6))
    for label, dd in dists.items():
        ax.plot(dd.hops, dd.probs, marker="s", ms=4, label=f"{label} (mean {dd.mean:.3g})")
    ax.set_xlabel("hops")
    ax.set_ylabel("probability")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_ccdf_comparison(sample_sets: dict, xlabel: str, path: str | Path) -> None:
    """Log-log CCDFs of normalized sample sets (label -> NormalizedSamples)."""
    fig, ax = plt.subplots(figsize=(5, 3.6))
    for label, samples in sample_sets.items():
        if isinstance(samples, NormalizedSamples) and samples.samples.size == 0:
            continue
        xs, frac = ccdf(samples, n_points=300)
        ax.plot(xs, frac, label=label)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("CCDF")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
