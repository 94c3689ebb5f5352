"""Capacity/delay assignment scenarios, time scaling, and traffic generation.

Two built-in weight scenarios cover opposite correlation regimes:

* scenario 1: capacities grow with the endpoint degrees
  (C = min(k, k') Mb/s, P = 500 * sqrt(k * k') / k_max ms);
* scenario 2: capacities shrink with degree (C = min(2000/k, 2000/k') Mb/s)
  and delays are uniform in [1, 500] ms, uncorrelated with degree.

The time transform multiplies capacities by alpha and divides propagation
delays by alpha; the simulator picks the same alpha up from the topology
metadata to scale protocol timeouts and source rates, which dilates the
whole system in time by 1/alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .topology import Topology


def assign_scenario(t: Topology, scenario: int, seed: int = 0) -> Topology:
    """Assign capacities and delays to every link per the given scenario."""
    if scenario not in (1, 2):
        raise ValueError(f"unknown scenario {scenario}")
    deg = t.degrees()
    k_max = max(deg) if deg else 1
    rng = np.random.default_rng(seed)
    caps = []
    delays = []
    for lk in t.links:
        k, kp = deg[lk.u], deg[lk.v]
        if scenario == 1:
            caps.append(float(min(k, kp)))
            delays.append(500.0 * math.sqrt(k * kp) / k_max)
        else:
            caps.append(2000.0 / max(k, kp))
            delays.append(rng.uniform(1.0, 500.0))
    out = t.with_attributes(caps, delays)
    out.meta["scenario"] = scenario
    return out


@dataclass(frozen=True)
class AlphaTransform:
    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")


def apply_alpha_transform(t: Topology, a: AlphaTransform | float) -> Topology:
    """Scale capacities by alpha and delays by 1/alpha; record alpha in metadata."""
    if not isinstance(a, AlphaTransform):
        a = AlphaTransform(float(a))
    if not t.weighted:
        raise ValueError("topology has no attributes to scale")
    caps = [lk.capacity * a.alpha for lk in t.links]
    delays = [lk.prop_delay / a.alpha for lk in t.links]
    out = t.with_attributes(caps, delays)
    out.meta["alpha"] = a.alpha
    return out


# -- traffic ---------------------------------------------------------------


@dataclass
class TrafficConfig:
    """Traffic model parameters. Rates are per actual simulated second;
    udp_rate is the unscaled base rate, multiplied by alpha at run time."""

    flow_rate: float                 # flows/s per selected SD pair
    horizon: float                   # seconds of simulated time to cover
    seed: int = 0
    sd_fraction: float = 0.1
    flow_model: str = "tcp_lite"     # or "udp_cbr"
    udp_rate: float = 6.0            # packets/s before alpha scaling
    packet_size: int = 1000          # bytes
    buffer: int = 300                # packets per link direction
    pareto_shape: float = 1.2
    pareto_mean: float = 4.0         # untruncated mean, packets
    max_packets: int = 10_000

    def __post_init__(self):
        if not 0 < self.sd_fraction <= 1:
            raise ValueError("sd_fraction must lie in (0, 1]")
        if self.flow_rate <= 0:
            raise ValueError("flow_rate must be positive")
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        if self.flow_model not in ("tcp_lite", "udp_cbr"):
            raise ValueError(f"unknown flow model {self.flow_model!r}")


@dataclass(frozen=True)
class Flow:
    flow_id: int
    pair_id: int
    src: int
    dst: int
    arrival: float        # seconds
    size: int             # packets


@dataclass
class FlowSchedule:
    pairs: list            # list of (src, dst)
    flows: list            # list of Flow, sorted by (arrival, pair_id)

    def time_scaled(self, factor: float) -> "FlowSchedule":
        """Copy with all arrival times multiplied by factor."""
        flows = [Flow(f.flow_id, f.pair_id, f.src, f.dst, f.arrival * factor, f.size)
                 for f in self.flows]
        return FlowSchedule(list(self.pairs), flows)

    def save(self, path: str | Path) -> None:
        lines = ["# netshrink flow trace",
                 "# pair <pair_id> <src> <dst>",
                 "# flow <pair_id> <arrival_s> <size_packets>"]
        for pid, (src, dst) in enumerate(self.pairs):
            lines.append(f"pair {pid} {src} {dst}")
        for f in self.flows:
            lines.append(f"flow {f.pair_id} {f.arrival!r} {f.size}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "FlowSchedule":
        pairs = []
        raw = []
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if parts[0] == "pair" and len(parts) == 4:
                pid = int(parts[1])
                if pid != len(pairs):
                    raise ValueError(f"{path}:{lineno}: pair ids must be dense and ordered")
                pairs.append((int(parts[2]), int(parts[3])))
            elif parts[0] == "flow" and len(parts) == 4:
                raw.append((int(parts[1]), float(parts[2]), int(parts[3])))
            else:
                raise ValueError(f"{path}:{lineno}: bad trace line {line!r}")
        flows = []
        for fid, (pid, arrival, size) in enumerate(raw):
            src, dst = pairs[pid]
            flows.append(Flow(fid, pid, src, dst, arrival, size))
        return cls(pairs, flows)


def sample_flow_sizes(cfg: TrafficConfig, n: int, rng: np.random.Generator) -> np.ndarray:
    """Packet counts: ceil of a Pareto variate, clamped to [1, max_packets].

    The Pareto scale is chosen so the untruncated continuous mean equals
    pareto_mean; the ceiling and the cap shift the realized mean slightly,
    which the tests account for exactly.
    """
    shape = cfg.pareto_shape
    x_m = cfg.pareto_mean * (shape - 1.0) / shape
    u = 1.0 - rng.random(n)       # (0, 1]
    x = x_m * u ** (-1.0 / shape)
    return np.clip(np.ceil(x).astype(int), 1, cfg.max_packets)


def select_sd_pairs(n_nodes: int, fraction: float, rng: np.random.Generator) -> list:
    """Uniformly sample floor(fraction * n(n-1)/2) distinct unordered pairs.

    The smaller node id acts as the flow source. Sequential rejection keeps
    the draw uniform without materializing the full pair space.
    """
    total = n_nodes * (n_nodes - 1) // 2
    m = int(fraction * total)
    chosen: dict[tuple[int, int], None] = {}
    while len(chosen) < m:
        batch = rng.integers(0, n_nodes, size=(max(2 * (m - len(chosen)), 64), 2))
        for u, v in batch:
            if u == v:
                continue
            pair = (int(u), int(v)) if u < v else (int(v), int(u))
            if pair not in chosen:
                chosen[pair] = None
                if len(chosen) == m:
                    break
    return list(chosen.keys())


def build_traffic(t: Topology, cfg: TrafficConfig) -> FlowSchedule:
    """Poisson flow arrivals on a random fraction of SD pairs.

    Deterministic given cfg.seed: pair selection, per-pair arrival times and
    flow sizes all derive from a single seeded generator.
    """
    rng = np.random.default_rng(cfg.seed)
    pairs = select_sd_pairs(t.n_nodes, cfg.sd_fraction, rng)
    records = []   # (arrival, pair_id, size)
    for pid, _ in enumerate(pairs):
        time = 0.0
        while True:
            time += rng.exponential(1.0 / cfg.flow_rate)
            if time >= cfg.horizon:
                break
            size = int(sample_flow_sizes(cfg, 1, rng)[0])
            records.append((time, pid, size))
    records.sort(key=lambda r: (r[0], r[1]))
    flows = []
    for fid, (arrival, pid, size) in enumerate(records):
        src, dst = pairs[pid]
        flows.append(Flow(fid, pid, src, dst, arrival, size))
    return FlowSchedule(pairs, flows)
