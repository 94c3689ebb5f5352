"""Weighted undirected graph model with edge-list I/O.

Node ids are dense integers in [0, N). Each link optionally carries a
capacity (Mb/s) and a propagation delay (ms); a topology is either fully
weighted or fully unweighted. Topologies are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence


@dataclass(frozen=True)
class Link:
    """One undirected link. Attributes are absent (None) on unweighted graphs."""

    u: int
    v: int
    capacity: float | None = None
    prop_delay: float | None = None

    @property
    def pair(self) -> tuple[int, int]:
        return (self.u, self.v) if self.u < self.v else (self.v, self.u)


class Topology:
    """Simple undirected graph: no self-loops, no parallel links.

    adjacency[i] is a list of (neighbor, link_index) pairs, so
    degree(i) == len(adjacency[i]).
    """

    def __init__(
        self,
        n_nodes: int,
        links: Sequence[Link],
        original_ids: Sequence[int] | None = None,
        meta: dict | None = None,
    ):
        self.n_nodes = int(n_nodes)
        self.links: tuple[Link, ...] = tuple(links)
        self.original_ids = list(original_ids) if original_ids is not None else None
        self.meta = dict(meta) if meta else {}

        seen: set[tuple[int, int]] = set()
        adjacency: list[list[tuple[int, int]]] = [[] for _ in range(self.n_nodes)]
        weighted = None
        for idx, lk in enumerate(self.links):
            if lk.u == lk.v:
                raise ValueError(f"self-loop at node {lk.u}")
            if not (0 <= lk.u < self.n_nodes and 0 <= lk.v < self.n_nodes):
                raise ValueError(f"link ({lk.u},{lk.v}) outside node range [0,{self.n_nodes})")
            if lk.pair in seen:
                raise ValueError(f"duplicate link {lk.pair}")
            seen.add(lk.pair)
            has_attrs = lk.capacity is not None and lk.prop_delay is not None
            if (lk.capacity is None) != (lk.prop_delay is None):
                raise ValueError(f"link {lk.pair} has only one of capacity/prop_delay")
            if weighted is None:
                weighted = has_attrs
            elif weighted != has_attrs:
                raise ValueError("mixed weighted and unweighted links")
            if has_attrs and (lk.capacity <= 0 or lk.prop_delay <= 0):
                raise ValueError(f"non-positive attribute on link {lk.pair}")
            adjacency[lk.u].append((lk.v, idx))
            adjacency[lk.v].append((lk.u, idx))
        self.weighted = bool(weighted) if self.links else False
        self.adjacency: list[list[tuple[int, int]]] = adjacency

    @property
    def n_links(self) -> int:
        return len(self.links)

    def degree(self, node: int) -> int:
        return len(self.adjacency[node])

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency]

    def neighbors(self, node: int) -> list[int]:
        return [v for v, _ in self.adjacency[node]]

    def with_attributes(self, capacities: Sequence[float], delays: Sequence[float]) -> "Topology":
        """Return a copy with link attributes replaced, in link order."""
        if len(capacities) != self.n_links or len(delays) != self.n_links:
            raise ValueError("attribute count does not match link count")
        links = [
            Link(lk.u, lk.v, float(c), float(p))
            for lk, c, p in zip(self.links, capacities, delays)
        ]
        return Topology(self.n_nodes, links, self.original_ids, self.meta)


def link_vectors(t: Topology) -> list[tuple[int, int, float, float]]:
    """One (k, k', C, P) vector per link, with endpoint degrees ordered k <= k'."""
    if not t.weighted:
        raise ValueError("topology has no capacity/delay attributes")
    deg = t.degrees()
    out = []
    for lk in t.links:
        k, kp = deg[lk.u], deg[lk.v]
        if k > kp:
            k, kp = kp, k
        out.append((k, kp, lk.capacity, lk.prop_delay))
    return out


def load_edge_list(path: str | Path) -> Topology:
    """Load a topology from a text edge list.

    Lines are ``u v [capacity_mbps prop_delay_ms]``; the two attribute
    columns must be present together or not at all, consistently across the
    file. ``#`` starts a comment. Input node ids are remapped to dense ids
    0..N-1 in sorted order of the original ids; the mapping is kept on the
    returned topology as ``original_ids``.
    """
    path = Path(path)
    raw_edges: list[tuple[int, int, float | None, float | None]] = []
    n_cols = None
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) not in (2, 4):
                if len(parts) == 3:
                    raise ValueError(
                        f"{path}:{lineno}: capacity given without prop_delay "
                        f"(expected 2 or 4 columns, got 3)"
                    )
                raise ValueError(f"{path}:{lineno}: expected 2 or 4 columns, got {len(parts)}")
            if n_cols is None:
                n_cols = len(parts)
            elif n_cols != len(parts):
                raise ValueError(f"{path}:{lineno}: inconsistent column count")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad node id: {exc}") from None
            if u == v:
                raise ValueError(f"{path}:{lineno}: self-loop at node {u}")
            cap = pdel = None
            if len(parts) == 4:
                try:
                    cap, pdel = float(parts[2]), float(parts[3])
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: bad attribute value: {exc}") from None
            raw_edges.append((u, v, cap, pdel))

    ids = sorted({u for u, _, _, _ in raw_edges} | {v for _, v, _, _ in raw_edges})
    dense = {orig: i for i, orig in enumerate(ids)}
    seen: set[tuple[int, int]] = set()
    links = []
    for u, v, cap, pdel in raw_edges:
        du, dv = dense[u], dense[v]
        pair = (du, dv) if du < dv else (dv, du)
        if pair in seen:
            raise ValueError(f"{path}: duplicate link between nodes {u} and {v}")
        seen.add(pair)
        links.append(Link(du, dv, cap, pdel))
    return Topology(len(ids), links, original_ids=ids)


def save_edge_list(t: Topology, path: str | Path) -> None:
    """Write a topology as a text edge list.

    Lines are sorted by (min id, max id); float attributes are written with
    repr so a reload is bit-faithful.
    """
    path = Path(path)
    lines = ["# netshrink edge list: u v" + (" capacity_mbps prop_delay_ms" if t.weighted else "")]
    lines.append(f"# nodes {t.n_nodes} links {t.n_links}")
    for lk in sorted(t.links, key=lambda l: l.pair):
        a, b = lk.pair
        if t.weighted:
            lines.append(f"{a} {b} {lk.capacity!r} {lk.prop_delay!r}")
        else:
            lines.append(f"{a} {b}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def save_node_map(t: Topology, path: str | Path) -> None:
    """Write the dense-id -> original-id mapping, one pair per line."""
    path = Path(path)
    lines = ["# dense_id original_id"]
    ids = t.original_ids if t.original_ids is not None else list(range(t.n_nodes))
    lines.extend(f"{i} {orig}" for i, orig in enumerate(ids))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def connected_components(t: Topology) -> list[list[int]]:
    """Connected components as sorted node-id lists, largest first."""
    seen = [False] * t.n_nodes
    comps = []
    for start in range(t.n_nodes):
        if seen[start]:
            continue
        seen[start] = True
        comp = [start]
        frontier = [start]
        while frontier:
            nxt = []
            for u in frontier:
                for v, _ in t.adjacency[u]:
                    if not seen[v]:
                        seen[v] = True
                        comp.append(v)
                        nxt.append(v)
            frontier = nxt
        comps.append(sorted(comp))
    comps.sort(key=lambda c: (-len(c), c[0] if c else 0))
    return comps


def giant_component(t: Topology) -> tuple[Topology, float]:
    """Largest connected component with re-densified ids, plus the fraction
    of nodes retained. Empty input yields an empty topology and retention 1.
    """
    if t.n_nodes == 0:
        return t, 1.0
    comp = connected_components(t)[0]
    keep = set(comp)
    dense = {old: i for i, old in enumerate(comp)}
    links = [
        Link(dense[lk.u], dense[lk.v], lk.capacity, lk.prop_delay)
        for lk in t.links
        if lk.u in keep
    ]
    orig = None
    if t.original_ids is not None:
        orig = [t.original_ids[old] for old in comp]
    retention = len(comp) / t.n_nodes
    return Topology(len(comp), links, original_ids=orig, meta=t.meta), retention


def is_connected(t: Topology) -> bool:
    if t.n_nodes == 0:
        return True
    return len(connected_components(t)[0]) == t.n_nodes
