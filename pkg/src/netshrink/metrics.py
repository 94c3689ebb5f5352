"""Topological and weighted-correlation statistics used for validation.

Per-node quantities (weighted neighbor degree, shortest-path load, local
clustering) are exposed both as raw arrays and as log-binned degree curves.
Curves can be normalized by their own average value so that networks of
different sizes can be compared by shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .distfit import EmpiricalCCDF, empirical_ccdf
from .topology import Topology, link_vectors

LOG_BIN_BASE = 2.0


@dataclass
class DegreeCurve:
    """Mean of a per-node quantity over log-binned degree classes."""

    bin_lo: np.ndarray      # lower edge of each bin (power of the log base)
    x: np.ndarray           # geometric bin center, for plotting
    mean: np.ndarray
    count: np.ndarray       # nodes per bin

    def normalized(self) -> "DegreeCurve":
        """Divide values by the count-weighted average of the curve."""
        avg = float(np.sum(self.mean * self.count) / np.sum(self.count))
        return DegreeCurve(self.bin_lo.copy(), self.x.copy(), self.mean / avg,
                           self.count.copy())

    def as_dict(self) -> dict:
        return {int(b): (float(m), int(c))
                for b, m, c in zip(self.bin_lo, self.mean, self.count)}

    def save(self, path: str | Path, label: str = "value") -> None:
        lines = [f"# degree_bin_center {label} node_count"]
        for xv, m, c in zip(self.x, self.mean, self.count):
            lines.append(f"{xv!r} {m!r} {int(c)}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass
class DistanceDistribution:
    hops: np.ndarray        # 1, 2, ...
    probs: np.ndarray
    mean: float
    std: float

    def save(self, path: str | Path) -> None:
        lines = ["# hops probability", f"# mean {self.mean!r} std {self.std!r}"]
        for h, p in zip(self.hops, self.probs):
            lines.append(f"{int(h)} {p!r}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def log_bin_curve(degrees, values, counts_per_value=None) -> DegreeCurve:
    """Average values over base-2 degree bins [2^m, 2^(m+1))."""
    degrees = np.asarray(degrees)
    values = np.asarray(values, dtype=float)
    if len(degrees) == 0:
        return DegreeCurve(np.array([], int), np.array([]), np.array([]), np.array([], int))
    # np.log2 is exact on powers of two, so bin edges land where they should
    bins = np.floor(np.log2(degrees)).astype(int)
    out_lo, out_x, out_mean, out_cnt = [], [], [], []
    for b in sorted(set(bins)):
        mask = bins == b
        lo = LOG_BIN_BASE ** b
        out_lo.append(int(lo))
        out_x.append(lo * math.sqrt(LOG_BIN_BASE))
        out_mean.append(values[mask].mean())
        out_cnt.append(int(mask.sum()))
    return DegreeCurve(np.array(out_lo), np.array(out_x), np.array(out_mean),
                       np.array(out_cnt))


def curve_slope(curve: DegreeCurve, min_bin_lo: int = 4, min_count: int = 20) -> float:
    """Least-squares log-log slope over mid-range bins (low-degree bins and
    sparsely populated bins excluded)."""
    mask = (curve.bin_lo >= min_bin_lo) & (curve.count >= min_count) & (curve.mean > 0)
    if mask.sum() < 2:
        raise ValueError("not enough populated bins for a slope fit")
    lx = np.log(curve.x[mask])
    ly = np.log(curve.mean[mask])
    return float(np.polyfit(lx, ly, 1)[0])


# -- weighted neighbor degree -----------------------------------------------


def node_weighted_neighbor_degree(t: Topology, weight: str) -> np.ndarray:
    """Per node: sum_j w_ij * k_j / sum_j w_ij over its neighbors j."""
    if not t.weighted:
        raise ValueError("topology has no attributes")
    if weight not in ("capacity", "prop_delay"):
        raise ValueError(f"unknown weight {weight!r}")
    deg = t.degrees()
    num = np.zeros(t.n_nodes)
    den = np.zeros(t.n_nodes)
    for lk in t.links:
        w = lk.capacity if weight == "capacity" else lk.prop_delay
        num[lk.u] += w * deg[lk.v]
        num[lk.v] += w * deg[lk.u]
        den[lk.u] += w
        den[lk.v] += w
    out = np.full(t.n_nodes, np.nan)
    nz = den > 0
    out[nz] = num[nz] / den[nz]
    return out


def weighted_neighbor_degree(t: Topology, weight: str) -> DegreeCurve:
    """C- or P-weighted neighbor degree averaged per log-binned degree class."""
    values = node_weighted_neighbor_degree(t, weight)
    deg = np.asarray(t.degrees())
    mask = deg > 0
    return log_bin_curve(deg[mask], values[mask])


# -- shortest-path load (betweenness) ----------------------------------------


def shortest_path_load(t: Topology, sample_sources: int | None = None,
                       seed: int = 0) -> np.ndarray:
    """Number of shortest paths passing through each node, over unordered
    pairs that exclude the node itself.

    Exact when sample_sources is None; otherwise an unbiased estimate from a
    seeded random subset of BFS sources. Raises on disconnected input.
    """
    n = t.n_nodes
    adj = t.adjacency
    if sample_sources is None or sample_sources >= n:
        sources = range(n)
        scale = 1.0
    else:
        rng = np.random.default_rng(seed)
        sources = [int(s) for s in rng.choice(n, size=sample_sources, replace=False)]
        scale = n / sample_sources
    load = np.zeros(n)
    for s in sources:
        dist = [-1] * n
        sigma = [0] * n
        order: list[int] = []
        dist[s] = 0
        sigma[s] = 1
        frontier = [s]
        while frontier:
            order.extend(frontier)
            nxt = []
            for v in frontier:
                dv = dist[v]
                sv = sigma[v]
                for w, _ in adj[v]:
                    if dist[w] < 0:
                        dist[w] = dv + 1
                        nxt.append(w)
                    if dist[w] == dv + 1:
                        sigma[w] += sv
            frontier = nxt
        if len(order) != n:
            raise ValueError("topology is not connected")
        # continuations[v]: number of shortest-path suffixes starting at v
        cont = [0] * n
        for v in reversed(order):
            dv1 = dist[v] + 1
            total = 0
            for w, _ in adj[v]:
                if dist[w] == dv1:
                    total += 1 + cont[w]
            cont[v] = total
        for v in order:
            if v != s:
                load[v] += sigma[v] * cont[v]
    return load * scale / 2.0


def betweenness_load(t: Topology, sample_sources: int | None = None,
                     seed: int = 0) -> DegreeCurve:
    """Average shortest-path load per log-binned degree class."""
    load = shortest_path_load(t, sample_sources, seed)
    deg = np.asarray(t.degrees())
    return log_bin_curve(deg, load)


# -- distances ----------------------------------------------------------------


def distance_distribution(t: Topology, sample_sources: int | None = None,
                          seed: int = 0) -> DistanceDistribution:
    """Distribution of shortest-path hop counts between node pairs."""
    n = t.n_nodes
    adj = t.adjacency
    if sample_sources is None or sample_sources >= n:
        sources = range(n)
    else:
        rng = np.random.default_rng(seed)
        sources = [int(s) for s in rng.choice(n, size=sample_sources, replace=False)]
    hist: dict[int, int] = {}
    for s in sources:
        dist = [-1] * n
        dist[s] = 0
        frontier = [s]
        reached = 1
        while frontier:
            nxt = []
            for v in frontier:
                dv1 = dist[v] + 1
                for w, _ in adj[v]:
                    if dist[w] < 0:
                        dist[w] = dv1
                        nxt.append(w)
                        reached += 1
                        hist[dv1] = hist.get(dv1, 0) + 1
            frontier = nxt
        if reached != n:
            raise ValueError("topology is not connected")
    hops = np.array(sorted(hist))
    counts = np.array([hist[h] for h in hops], dtype=float)
    probs = counts / counts.sum()
    mean = float(np.sum(hops * probs))
    std = float(math.sqrt(np.sum((hops - mean) ** 2 * probs)))
    return DistanceDistribution(hops, probs, mean, std)


# -- degree structure ----------------------------------------------------------


def degree_distribution(t: Topology) -> EmpiricalCCDF:
    return empirical_ccdf(t.degrees())


def joint_degree_distribution(t: Topology) -> dict:
    """p(k, k'): probability that a link connects degrees k <= k'."""
    deg = t.degrees()
    counts: dict[tuple[int, int], int] = {}
    for lk in t.links:
        k, kp = deg[lk.u], deg[lk.v]
        pair = (k, kp) if k <= kp else (kp, k)
        counts[pair] = counts.get(pair, 0) + 1
    total = t.n_links
    return {pair: c / total for pair, c in counts.items()}


def degree_distribution_from_links(t: Topology) -> dict:
    """P(k) recovered from the link vectors via P(k) = (kbar/k) * sum over
    links' endpoint-degree mass; must agree exactly with the node count."""
    deg = t.degrees()
    kbar = sum(deg) / t.n_nodes
    mass: dict[int, float] = {}
    for k, kp, _, _ in link_vectors(t):
        for d in (k, kp):
            mass[d] = mass.get(d, 0.0) + 1.0
    total = 2.0 * t.n_links
    return {k: (kbar / k) * (m / total) for k, m in mass.items()}


def assortativity(t: Topology) -> float:
    """Pearson correlation of degrees over link endpoints; NaN if degenerate."""
    if t.n_links == 0:
        return float("nan")
    deg = t.degrees()
    a = np.array([deg[lk.u] for lk in t.links], dtype=float)
    b = np.array([deg[lk.v] for lk in t.links], dtype=float)
    x = np.concatenate([a, b])
    y = np.concatenate([b, a])
    sx = x.std()
    if sx == 0:
        return float("nan")
    return float(np.mean((x - x.mean()) * (y - y.mean())) / (sx * y.std()))


# -- clustering ----------------------------------------------------------------


def node_triangles(t: Topology) -> np.ndarray:
    """Triangles incident to each node, via neighbor-set intersection."""
    sets = [set(t.neighbors(i)) for i in range(t.n_nodes)]
    tri = np.zeros(t.n_nodes, dtype=np.int64)
    for lk in t.links:
        common = len(sets[lk.u] & sets[lk.v])
        tri[lk.u] += common
        tri[lk.v] += common
    return tri // 2


def node_clustering(t: Topology) -> np.ndarray:
    """Local clustering coefficient; 0 for nodes of degree < 2."""
    tri = node_triangles(t)
    deg = np.asarray(t.degrees(), dtype=float)
    out = np.zeros(t.n_nodes)
    mask = deg >= 2
    out[mask] = 2.0 * tri[mask] / (deg[mask] * (deg[mask] - 1.0))
    return out


def mean_clustering(t: Topology) -> float:
    if t.n_nodes == 0:
        return float("nan")
    return float(node_clustering(t).mean())


def clustering_by_degree(t: Topology) -> DegreeCurve:
    """Mean local clustering per log-binned degree class (degree >= 2 only)."""
    c = node_clustering(t)
    deg = np.asarray(t.degrees())
    mask = deg >= 2
    return log_bin_curve(deg[mask], c[mask])


def clustering_per_degree(t: Topology) -> dict:
    """Exact mean clustering per distinct degree >= 2; the rewiring target."""
    c = node_clustering(t)
    deg = np.asarray(t.degrees())
    out: dict[int, float] = {}
    for k in sorted(set(int(d) for d in deg if d >= 2)):
        out[k] = float(c[deg == k].mean())
    return out


def save_clustering_target(target: dict, path: str | Path) -> None:
    lines = ["# degree mean_clustering"]
    lines.extend(f"{k} {v!r}" for k, v in sorted(target.items()))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_clustering_target(path: str | Path) -> dict:
    out: dict[int, float] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        k, v = line.split()
        out[int(k)] = float(v)
    return out
