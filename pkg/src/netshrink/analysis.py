"""Normalize simulation results and compare runs across scales.

Multiplying raw completion times and packet delays by the run's alpha puts
runs at different scales on a common time axis; the two-sample KS distance
then quantifies how well a downscaled run reproduces the full-scale one.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .simulator import SimResults


@dataclass
class NormalizedSamples:
    samples: np.ndarray     # seconds * alpha
    alpha: float
    label: str = ""

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if np.any(self.samples < 0):
            raise ValueError("samples must be non-negative")


def normalize(r: SimResults) -> tuple[NormalizedSamples, NormalizedSamples]:
    """Alpha-normalized flow completion times and packet delays."""
    fct = NormalizedSamples(r.fct_values * r.alpha, r.alpha, "fct")
    delay = NormalizedSamples(r.delays * r.alpha, r.alpha, "delay")
    return fct, delay


def ccdf(samples: NormalizedSamples | np.ndarray, n_points: int = 200):
    """CCDF on a log-spaced grid: (grid, fraction of samples >= grid point)."""
    vals = samples.samples if isinstance(samples, NormalizedSamples) else np.asarray(samples)
    if vals.size == 0:
        raise ValueError("no samples")
    svals = np.sort(vals)
    lo = svals[svals > 0][0] if np.any(svals > 0) else 1e-9
    hi = svals[-1]
    if hi <= lo:
        grid = np.array([lo])
    else:
        grid = np.geomspace(lo, hi, n_points)
    frac = 1.0 - np.searchsorted(svals, grid, side="left") / svals.size
    return grid, frac


def step_ccdf(samples: NormalizedSamples | np.ndarray):
    """Exact step CCDF at every distinct sample value."""
    vals = samples.samples if isinstance(samples, NormalizedSamples) else np.asarray(samples)
    if vals.size == 0:
        raise ValueError("no samples")
    svals = np.sort(vals)
    xs = np.unique(svals)
    frac = 1.0 - np.searchsorted(svals, xs, side="left") / svals.size
    return xs, frac


def trim_top(values: np.ndarray, fraction: float) -> np.ndarray:
    """Drop samples above the (1 - fraction) quantile."""
    if fraction <= 0:
        return values
    cut = np.quantile(values, 1.0 - fraction)
    return values[values <= cut]


def ks_distance(a, b, trim_top_fraction: float = 0.0) -> float:
    """Two-sample Kolmogorov-Smirnov statistic, optionally ignoring each
    sample set's extreme upper tail."""
    xa = a.samples if isinstance(a, NormalizedSamples) else np.asarray(a, dtype=float)
    xb = b.samples if isinstance(b, NormalizedSamples) else np.asarray(b, dtype=float)
    if xa.size == 0 or xb.size == 0:
        raise ValueError("empty sample set")
    xa = np.sort(trim_top(xa, trim_top_fraction))
    xb = np.sort(trim_top(xb, trim_top_fraction))
    grid = np.concatenate([xa, xb])
    cdf_a = np.searchsorted(xa, grid, side="right") / xa.size
    cdf_b = np.searchsorted(xb, grid, side="right") / xb.size
    return float(np.abs(cdf_a - cdf_b).max())


def ks_critical_value(n: int, m: int, significance: float = 0.01) -> float:
    """Asymptotic two-sample KS critical value at the given significance."""
    coeff = np.sqrt(-0.5 * np.log(significance / 2.0))
    return float(coeff * np.sqrt((n + m) / (n * m)))


def tail_quantile_gap(a, b, qs=(0.99, 0.999)) -> dict:
    """Relative gap between upper quantiles of two normalized sample sets."""
    xa = a.samples if isinstance(a, NormalizedSamples) else np.asarray(a)
    xb = b.samples if isinstance(b, NormalizedSamples) else np.asarray(b)
    out = {}
    for q in qs:
        va, vb = np.quantile(xa, q), np.quantile(xb, q)
        out[q] = abs(va - vb) / va if va > 0 else float("nan")
    return out


def compare_report(
    fct_a: NormalizedSamples, delay_a: NormalizedSamples,
    fct_b: NormalizedSamples, delay_b: NormalizedSamples,
    threshold: float, trim_top_fraction: float = 0.001,
    label_a: str = "a", label_b: str = "b",
) -> tuple[str, bool]:
    """Text verdict comparing two normalized runs; True when both KS
    distances stay at or below the threshold."""
    ks_fct = ks_distance(fct_a, fct_b, trim_top_fraction)
    ks_delay = ks_distance(delay_a, delay_b, trim_top_fraction)
    ok = ks_fct <= threshold and ks_delay <= threshold
    lines = [
        f"compare {label_a} (alpha={fct_a.alpha!r}) vs {label_b} (alpha={fct_b.alpha!r})",
        f"samples_fct = {fct_a.samples.size} vs {fct_b.samples.size}",
        f"samples_delay = {delay_a.samples.size} vs {delay_b.samples.size}",
        f"trim_top_fraction = {trim_top_fraction!r}",
        f"ks_fct = {ks_fct!r}",
        f"ks_delay = {ks_delay!r}",
        f"threshold = {threshold!r}",
    ]
    for q, gap in tail_quantile_gap(fct_a, fct_b).items():
        lines.append(f"fct_tail_gap_q{q} = {gap!r}")
    for q, gap in tail_quantile_gap(delay_a, delay_b).items():
        lines.append(f"delay_tail_gap_q{q} = {gap!r}")
    lines.append(f"verdict = {'pass' if ok else 'fail'}")
    return "\n".join(lines) + "\n", ok
