"""Synthetic scale-free test networks via the erased configuration model."""

from __future__ import annotations

import numpy as np

from .topology import Link, Topology, giant_component


def power_law_degrees(n: int, gamma: float, k_min: int = 2, k_max: int | None = None,
                      seed: int = 0) -> np.ndarray:
    """Sample n degrees from P(k) proportional to k^-gamma on [k_min, k_max].

    k_max defaults to the structural cutoff sqrt(n), which keeps the stub
    matching close to uncorrelated. An odd degree sum is fixed by bumping one
    uniformly chosen degree by 1.
    """
    if k_max is None:
        k_max = max(k_min + 1, int(np.sqrt(n)))
    ks = np.arange(k_min, k_max + 1)
    probs = ks.astype(float) ** -gamma
    probs /= probs.sum()
    rng = np.random.default_rng(seed)
    degrees = rng.choice(ks, size=n, p=probs)
    if degrees.sum() % 2 == 1:
        degrees[rng.integers(0, n)] += 1
    return degrees


def configuration_graph(degrees, seed: int = 0) -> Topology:
    """Pair shuffled stubs; self-loops and parallel edges are discarded."""
    degrees = np.asarray(degrees, dtype=int)
    if degrees.sum() % 2 == 1:
        raise ValueError("degree sum must be even")
    stubs = np.repeat(np.arange(len(degrees)), degrees)
    rng = np.random.default_rng(seed)
    rng.shuffle(stubs)
    seen: set[tuple[int, int]] = set()
    links = []
    for u, v in zip(stubs[0::2], stubs[1::2]):
        if u == v:
            continue
        pair = (int(u), int(v)) if u < v else (int(v), int(u))
        if pair in seen:
            continue
        seen.add(pair)
        links.append(Link(pair[0], pair[1]))
    return Topology(len(degrees), links)


def power_law_graph(n: int, gamma: float, k_min: int = 2, k_max: int | None = None,
                    seed: int = 0) -> Topology:
    """Giant component of a configuration-model graph with power-law degrees."""
    degrees = power_law_degrees(n, gamma, k_min, k_max, seed)
    g = configuration_graph(degrees, seed + 1)
    gcc, retention = giant_component(g)
    gcc.meta["gcc_retention"] = retention
    return gcc
