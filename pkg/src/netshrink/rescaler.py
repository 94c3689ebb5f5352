"""Build a downscaled replica that preserves joint degree/capacity/delay
correlations.

The pipeline: fit smooth marginal CCDFs of degrees, capacities and delays;
sample a target degree sequence and target link attributes; sample reference
links from the original network; replace each component of every reference
vector by the equally-ranked value from the corresponding target list; then
bind degree labels to concrete nodes and repair collisions with swaps that
keep every link's (k, k', C, P) vector intact.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .distfit import SmoothedDist, empirical_ccdf, fit_smoothing_spline
from .topology import Link, Topology, giant_component, is_connected, link_vectors

REPAIR_BUDGET_PER_LINK = 100


@dataclass
class RescaleSpec:
    n_target: int
    rng_seed: int = 0
    smoothing: float | None = None          # None selects by GCV
    extrapolation_factor: float = 1.0
    link_sampling: str = "without_replacement_if_possible"

    def __post_init__(self):
        if self.n_target < 2:
            raise ValueError("n_target must be >= 2")
        if self.link_sampling not in ("without_replacement_if_possible", "with_replacement"):
            raise ValueError(f"unknown link sampling mode {self.link_sampling!r}")


@dataclass
class RankLists:
    """Sorted target value lists: 2L' stub labels, L' capacities, L' delays."""

    stub_labels: np.ndarray
    capacities: np.ndarray
    delays: np.ndarray

    def __post_init__(self):
        if len(self.stub_labels) != 2 * len(self.capacities):
            raise ValueError("stub label list must have twice the link count")
        if len(self.capacities) != len(self.delays):
            raise ValueError("capacity and delay lists must have equal length")
        for arr in (self.stub_labels, self.capacities, self.delays):
            if np.any(np.diff(arr) < 0):
                raise ValueError("rank lists must be sorted non-decreasing")


def fit_marginals(
    t: Topology,
    smoothing: float | None = None,
    extrapolation_factor: float = 1.0,
) -> tuple[SmoothedDist, SmoothedDist, SmoothedDist]:
    """Fitted degree, capacity and delay distributions of a weighted topology."""
    vecs = link_vectors(t)
    s_k = fit_smoothing_spline(
        empirical_ccdf(t.degrees()), smoothing, integer_valued=True,
        extrapolation_factor=extrapolation_factor)
    s_c = fit_smoothing_spline(
        empirical_ccdf([v[2] for v in vecs]), smoothing,
        extrapolation_factor=extrapolation_factor)
    s_p = fit_smoothing_spline(
        empirical_ccdf([v[3] for v in vecs]), smoothing,
        extrapolation_factor=extrapolation_factor)
    return s_k, s_c, s_p


def sample_degree_sequence(s_k: SmoothedDist, n_target: int,
                           seed: int) -> tuple[np.ndarray, int]:
    """n_target degrees >= 1 with an even sum; the link target is half the sum.

    An odd sum is fixed by resampling one uniformly chosen entry (up to 100
    tries); if the distribution cannot produce an even sum that way (e.g. a
    point mass on an odd value), one entry is incremented instead.
    """
    if n_target < 2:
        raise ValueError("n_target must be >= 2")
    if not s_k.integer_valued:
        raise ValueError("degree distribution must be integer-valued")
    degrees = np.asarray(s_k.sample(n_target, seed), dtype=int)
    rng = np.random.default_rng([seed, 1])
    tries = 0
    while degrees.sum() % 2 == 1 and tries < 100:
        i = int(rng.integers(0, n_target))
        x = s_k.quantile(1.0 - rng.random())
        degrees[i] = max(1, int(np.rint(x)))
        tries += 1
    if degrees.sum() % 2 == 1:
        degrees[int(rng.integers(0, n_target))] += 1
    return degrees, int(degrees.sum() // 2)


def sample_link_attributes(s_c: SmoothedDist, s_p: SmoothedDist, l_target: int,
                           seed: int) -> tuple[np.ndarray, np.ndarray]:
    """L' i.i.d. capacities and L' i.i.d. delays from the fitted marginals."""
    if l_target < 1:
        raise ValueError("l_target must be >= 1")
    caps = np.asarray(s_c.sample(l_target, np.random.SeedSequence([seed, 2])), dtype=float)
    delays = np.asarray(s_p.sample(l_target, np.random.SeedSequence([seed, 3])), dtype=float)
    return caps, delays


def sample_reference_links(t: Topology, l_target: int, seed: int,
                           mode: str = "without_replacement_if_possible") -> list:
    """L' (k, k', C, P) vectors sampled from the original network's links."""
    vecs = link_vectors(t)
    if l_target < 1:
        raise ValueError("l_target must be >= 1")
    rng = np.random.default_rng(seed)
    replace = mode == "with_replacement" or l_target > len(vecs)
    idx = rng.choice(len(vecs), size=l_target, replace=replace)
    return [vecs[int(i)] for i in idx]


def _stable_ranks(values: np.ndarray) -> np.ndarray:
    """Rank of each element in its sorted order; equal values get the
    distinct consecutive positions in order of first occurrence."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.int64)
    ranks[order] = np.arange(len(values))
    return ranks


def rank_match(ref: list, ranks: RankLists) -> list:
    """Replace every component of every reference vector by the target value
    at the same rank position.

    Degrees of both endpoints rank within one combined list of 2L' stub
    labels; capacities and delays rank within their own L' lists.
    """
    if len(ref) != len(ranks.capacities):
        raise ValueError("reference link count does not match rank lists")
    flat_deg = np.array([d for v in ref for d in (v[0], v[1])], dtype=float)
    caps = np.array([v[2] for v in ref], dtype=float)
    delays = np.array([v[3] for v in ref], dtype=float)
    new_deg = ranks.stub_labels[_stable_ranks(flat_deg)]
    new_cap = ranks.capacities[_stable_ranks(caps)]
    new_del = ranks.delays[_stable_ranks(delays)]
    return [
        (int(new_deg[2 * i]), int(new_deg[2 * i + 1]), float(new_cap[i]), float(new_del[i]))
        for i in range(len(ref))
    ]


def assemble_network(vectors: list, degrees: np.ndarray,
                     seed: int = 0) -> tuple[Topology, int]:
    """Bind degree labels to node ids and build a simple topology.

    Nodes that share a target degree are interchangeable: labels are consumed
    from per-degree FIFO queues over a seeded shuffle. Self-loops and parallel
    links are then repaired by exchanging endpoints between links at positions
    of equal target degree (which keeps both links' vectors and all node
    degrees unchanged); links still offending after the attempt budget are
    dropped and counted.
    """
    degrees = np.asarray(degrees, dtype=int)
    labels_needed = sorted(d for v in vectors for d in (v[0], v[1]))
    labels_have = sorted(np.repeat(degrees, degrees).tolist())
    if labels_needed != labels_have:
        raise ValueError("stub label multiset does not match the degree sequence")

    rng = np.random.default_rng(seed)
    queues: dict[int, deque] = {}
    for d in sorted(set(degrees.tolist())):
        nodes = np.repeat(np.where(degrees == d)[0], d)
        rng.shuffle(nodes)
        queues[d] = deque(int(x) for x in nodes)

    ends = []
    attrs = []
    for d1, d2, cap, pdel in vectors:
        ends.append([queues[d1].popleft(), queues[d2].popleft()])
        attrs.append((cap, pdel))

    dropped = _repair_collisions(ends, degrees, rng)

    links = []
    seen: set[tuple[int, int]] = set()
    for (u, v), (cap, pdel) in zip(ends, attrs):
        if u == v:
            continue
        pair = (u, v) if u < v else (v, u)
        if pair in seen:
            continue
        seen.add(pair)
        links.append(Link(pair[0], pair[1], cap, pdel))
    return Topology(len(degrees), links), dropped


def _repair_collisions(ends: list, tdeg: np.ndarray, rng: np.random.Generator) -> int:
    """Swap same-degree endpoints between links until the graph is simple or
    the budget runs out. Returns the number of links left to drop."""
    n_links = len(ends)

    def pair_of(i):
        u, v = ends[i]
        return (u, v) if u < v else (v, u)

    pair_links: dict[tuple[int, int], set] = {}
    for i in range(n_links):
        pair_links.setdefault(pair_of(i), set()).add(i)

    def is_bad(i):
        u, v = ends[i]
        return u == v or len(pair_links[pair_of(i)]) > 1

    offenders = sorted(i for i in range(n_links) if is_bad(i))
    budget = REPAIR_BUDGET_PER_LINK * n_links
    attempts = 0
    while offenders and attempts < budget:
        attempts += 1
        li = offenders[int(rng.integers(0, len(offenders)))]
        mi = int(rng.integers(0, n_links))
        if mi == li:
            continue
        sl = int(rng.integers(0, 2))
        d = tdeg[ends[li][sl]]
        sides = [s for s in (0, 1) if tdeg[ends[mi][s]] == d]
        if not sides:
            continue
        sm = sides[0] if len(sides) == 1 else sides[int(rng.integers(0, 2))]
        a, b = ends[li][sl], ends[li][1 - sl]
        c, dn = ends[mi][sm], ends[mi][1 - sm]
        if c == b or a == dn:
            continue
        new_l = (c, b) if c < b else (b, c)
        new_m = (a, dn) if a < dn else (dn, a)
        if new_l == new_m:
            continue
        old_l, old_m = pair_of(li), pair_of(mi)
        exclude = {li, mi}
        if pair_links.get(new_l, set()) - exclude or pair_links.get(new_m, set()) - exclude:
            continue
        pair_links[old_l].discard(li)
        pair_links[old_m].discard(mi)
        ends[li][sl] = c
        ends[mi][sm] = a
        pair_links.setdefault(new_l, set()).add(li)
        pair_links.setdefault(new_m, set()).add(mi)
        touched = set()
        for p in (old_l, old_m, new_l, new_m):
            touched |= pair_links.get(p, set())
        offenders = sorted((set(offenders) - touched) | {i for i in touched if is_bad(i)})
    return len(offenders)


def rescale(t: Topology, spec: RescaleSpec) -> Topology:
    """Full rescaling pipeline; the result is the giant component of the
    assembled replica, with the run recorded in its metadata."""
    if not t.weighted:
        raise ValueError("original topology must carry capacities and delays")
    if not is_connected(t):
        raise ValueError("original topology must be connected (extract the "
                         "giant component first)")
    stage = np.random.SeedSequence(spec.rng_seed).generate_state(4)
    s_k, s_c, s_p = fit_marginals(t, spec.smoothing, spec.extrapolation_factor)
    degrees, l_target = sample_degree_sequence(s_k, spec.n_target, int(stage[0]))
    caps, delays = sample_link_attributes(s_c, s_p, l_target, int(stage[1]))
    ref = sample_reference_links(t, l_target, int(stage[2]), spec.link_sampling)
    ranks = RankLists(
        stub_labels=np.sort(np.repeat(degrees, degrees)),
        capacities=np.sort(caps),
        delays=np.sort(delays),
    )
    vectors = rank_match(ref, ranks)
    net, dropped = assemble_network(vectors, degrees, int(stage[3]))
    gcc, retention = giant_component(net)
    gcc.meta.update({
        "size_alpha": spec.n_target / t.n_nodes,
        "rescale_seed": spec.rng_seed,
        "n_target": spec.n_target,
        "l_target": l_target,
        "dropped_links": dropped,
        "gcc_retention": retention,
    })
    return gcc
