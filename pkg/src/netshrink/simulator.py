"""Deterministic packet-level discrete-event simulator.

Links are full duplex: each direction has a FIFO queue of at most
``buffer`` packets, the head of which is in transmission. Routing is
hop-count shortest path with a smallest-id tie-break applied from the
smaller endpoint of each pair, so the route of (u, v) is exactly the
reverse of the route of (v, u). Two flow models are provided: a
constant-rate UDP source and a small window-based TCP (slow start,
congestion avoidance of +1 packet per RTT, timeout and triple-duplicate-ack
retransmission, per-packet 40-byte acks on the reverse route).

Every time constant in the simulator is a base value divided by the
configured alpha: link rates and propagation delays arrive pre-scaled on
the topology, while the initial RTT estimate, the RTO bounds and the UDP
emission interval are scaled here. Because scaling by a power of two is
exact in binary floating point, running the same flow trace at alpha = 1
and at alpha = 2**-m produces event times that differ exactly by the
factor 1/alpha, identical queue-length sample paths, and bit-identical
alpha-normalized delays. Events are ordered by (time, sequence) with the
sequence assigned at scheduling, which makes simultaneous events
deterministic.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from heapq import heappush, heappop
from pathlib import Path

import numpy as np

from .scenario import FlowSchedule
from .topology import Topology

K_FLOW, K_APP, K_TX, K_PROP, K_TIMEOUT = range(5)


class Routes:
    """Shortest-path routes, symmetric per unordered pair.

    The path for (u, v) with u < v is walked from u along neighbors that
    decrease the BFS distance to v, choosing the smallest node id at every
    step; (v, u) uses the same path reversed.
    """

    def __init__(self, t: Topology):
        self.n = t.n_nodes
        self.adj = [sorted(t.neighbors(i)) for i in range(self.n)]
        self._dist: dict[int, np.ndarray] = {}

    def _dist_to(self, dest: int) -> np.ndarray:
        cached = self._dist.get(dest)
        if cached is not None:
            return cached
        dist = np.full(self.n, -1, dtype=np.int32)
        dist[dest] = 0
        frontier = [dest]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for v in frontier:
                for w in self.adj[v]:
                    if dist[w] < 0:
                        dist[w] = d
                        nxt.append(w)
            frontier = nxt
        if (dist < 0).any():
            raise ValueError("topology is not connected")
        self._dist[dest] = dist
        return dist

    def path(self, u: int, v: int) -> tuple:
        if u == v:
            raise ValueError("source equals destination")
        a, b = (u, v) if u < v else (v, u)
        dist = self._dist_to(b)
        hops = [a]
        cur = a
        while cur != b:
            want = dist[cur] - 1
            for w in self.adj[cur]:       # adj sorted: first hit = smallest id
                if dist[w] == want:
                    cur = w
                    break
            hops.append(cur)
        return tuple(hops) if u < v else tuple(reversed(hops))


def compute_routes(t: Topology) -> Routes:
    """Routing table factory; raises on disconnected input."""
    r = Routes(t)
    if t.n_nodes:
        r._dist_to(t.n_nodes - 1)   # fail fast when disconnected
    return r


@dataclass
class SimConfig:
    horizon: float                 # simulated seconds (already the 1/alpha-long window)
    alpha: float = 1.0
    flow_model: str = "tcp_lite"   # or "udp_cbr"
    buffer: int = 300              # packets held per link direction, head in service
    packet_size: int = 1000        # data bytes
    ack_size: int = 40             # bytes
    udp_rate: float = 6.0          # packets/s before alpha scaling
    initial_rtt: float = 1.0       # s, divided by alpha
    min_rto: float = 1.0           # s, divided by alpha
    max_rto: float = 60.0          # s, divided by alpha
    stretch_arrivals: bool = False # divide trace arrival times by alpha (dilation replay)
    record_queue_paths: bool = False
    seed: int = 0                  # recorded for manifests; the engine draws nothing

    def __post_init__(self):
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if self.flow_model not in ("tcp_lite", "udp_cbr"):
            raise ValueError(f"unknown flow model {self.flow_model!r}")


@dataclass
class SimResults:
    alpha: float
    horizon: float
    fct: list                      # (flow_id, completion seconds)
    delays: np.ndarray             # end-to-end seconds per delivered data packet
    completed_flows: int
    total_flows: int
    drops: dict                    # (u, v) direction -> dropped packets
    emitted: int                   # packet copies entering the network (incl. acks)
    delivered: int
    dropped: int
    residual: int                  # copies still queued or propagating at the horizon
    queue_paths: list = field(default_factory=list)  # (event_seq, link_dir, qlen, op)

    @property
    def fct_values(self) -> np.ndarray:
        return np.array([v for _, v in self.fct])

    def save(self, outdir: str | Path) -> None:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        lines = ["# flow_id completion_s"]
        lines += [f"{fid} {val!r}" for fid, val in self.fct]
        (outdir / "fct.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
        lines = ["# packet delay_s"]
        lines += [f"{i} {val!r}" for i, val in enumerate(self.delays)]
        (outdir / "delays.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
        summary = [
            f"alpha = {self.alpha!r}",
            f"horizon = {self.horizon!r}",
            f"completed_flows = {self.completed_flows}",
            f"total_flows = {self.total_flows}",
            f"completion_fraction = {self.completed_flows / max(self.total_flows, 1)!r}",
            f"packets_emitted = {self.emitted}",
            f"packets_delivered = {self.delivered}",
            f"packets_dropped = {self.dropped}",
            f"packets_residual = {self.residual}",
        ]
        (outdir / "summary.txt").write_text("\n".join(summary) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, outdir: str | Path) -> "SimResults":
        outdir = Path(outdir)
        kv = {}
        for line in (outdir / "summary.txt").read_text(encoding="utf-8").splitlines():
            if "=" in line:
                k, _, v = line.partition("=")
                kv[k.strip()] = v.strip()
        fct = []
        for line in (outdir / "fct.txt").read_text(encoding="utf-8").splitlines():
            if line.startswith("#") or not line.strip():
                continue
            fid, val = line.split()
            fct.append((int(fid), float(val)))
        delays = []
        for line in (outdir / "delays.txt").read_text(encoding="utf-8").splitlines():
            if line.startswith("#") or not line.strip():
                continue
            delays.append(float(line.split()[1]))
        return cls(
            alpha=float(kv["alpha"]), horizon=float(kv["horizon"]),
            fct=fct, delays=np.array(delays),
            completed_flows=int(kv["completed_flows"]),
            total_flows=int(kv["total_flows"]),
            drops={}, emitted=int(kv["packets_emitted"]),
            delivered=int(kv["packets_delivered"]),
            dropped=int(kv["packets_dropped"]),
            residual=int(kv["packets_residual"]),
        )


class _DirLink:
    __slots__ = ("key", "cap_bps", "prop_s", "queue", "drops")

    def __init__(self, key, cap_bps, prop_s):
        self.key = key
        self.cap_bps = cap_bps
        self.prop_s = prop_s
        self.queue: deque = deque()    # head of the queue is in transmission
        self.drops = 0


class _Pkt:
    __slots__ = ("flow", "seq_num", "bits", "is_ack", "path", "hop", "entry", "ack_value")

    def __init__(self, flow, seq_num, bits, is_ack, path, entry, ack_value=-1):
        self.flow = flow
        self.seq_num = seq_num
        self.bits = bits
        self.is_ack = is_ack
        self.path = path
        self.hop = 1
        self.entry = entry
        self.ack_value = ack_value


class _FlowState:
    __slots__ = (
        "fid", "arrival", "size", "path", "rpath", "completed",
        # udp
        "next_idx", "resolved",
        # tcp sender
        "cwnd", "ssthresh", "srtt", "rttvar", "rto", "cum_acked", "next_new",
        "dupacks", "send_time", "retx", "timer_gen", "timer_on",
        # tcp receiver
        "received", "rcv_cum",
    )

    def __init__(self, fid, arrival, size, path):
        self.fid = fid
        self.arrival = arrival
        self.size = size
        self.path = path
        self.rpath = tuple(reversed(path))
        self.completed = False
        self.next_idx = 0
        self.resolved = 0
        self.cwnd = 1.0
        self.ssthresh = math.inf
        self.srtt = None
        self.rttvar = 0.0
        self.rto = 0.0
        self.cum_acked = 0
        self.next_new = 0
        self.dupacks = 0
        self.send_time = None
        self.retx = None
        self.timer_gen = 0
        self.timer_on = False
        self.received = None
        self.rcv_cum = 0


class _Engine:
    """One simulation run. All state lives here; determinism comes from the
    (time, seq) event order and the absence of any RNG draw."""

    def __init__(self, t: Topology, schedule: FlowSchedule, cfg: SimConfig):
        meta_alpha = t.meta.get("alpha", 1.0)
        if meta_alpha != cfg.alpha:
            raise ValueError(
                f"config alpha {cfg.alpha} does not match topology alpha {meta_alpha}")
        if not t.weighted:
            raise ValueError("topology has no capacities/delays")
        self.cfg = cfg
        a = cfg.alpha
        self.udp_interval = 1.0 / (cfg.udp_rate * a)
        self.min_rto = cfg.min_rto / a
        self.max_rto = cfg.max_rto / a
        self.initial_rto = cfg.initial_rtt / a
        self.data_bits = cfg.packet_size * 8
        self.ack_bits = cfg.ack_size * 8
        self.is_tcp = cfg.flow_model == "tcp_lite"

        self.dirlinks: dict[tuple[int, int], _DirLink] = {}
        for lk in t.links:
            cap_bps = lk.capacity * 1e6
            prop_s = lk.prop_delay / 1e3
            self.dirlinks[(lk.u, lk.v)] = _DirLink((lk.u, lk.v), cap_bps, prop_s)
            self.dirlinks[(lk.v, lk.u)] = _DirLink((lk.v, lk.u), cap_bps, prop_s)

        routes = compute_routes(t)
        path_cache: dict[tuple[int, int], tuple] = {}
        self.flows: list[_FlowState] = []
        self.heap: list = []
        self.seq = 0
        for f in schedule.flows:
            key = (f.src, f.dst)
            path = path_cache.get(key)
            if path is None:
                path = routes.path(f.src, f.dst)
                path_cache[key] = path
            arrival = f.arrival / a if cfg.stretch_arrivals else f.arrival
            st = _FlowState(f.flow_id, arrival, f.size, path)
            self.flows.append(st)
            self._push(arrival, K_FLOW, st, 0)

        self.fct: list = []
        self.delays: list = []
        self.emitted = 0
        self.delivered = 0
        self.dropped = 0
        self.completed = 0
        self.queue_paths: list = []

    # -- event plumbing ----------------------------------------------------

    def _push(self, time, kind, obj, extra):
        self.seq += 1
        heappush(self.heap, (time, self.seq, kind, obj, extra))

    def _log_q(self, dl, op):
        if self.cfg.record_queue_paths:
            self.queue_paths.append((self.seq, dl.key, len(dl.queue), op))

    # -- link layer ----------------------------------------------------------

    def _enqueue(self, dl: _DirLink, pkt: _Pkt, now: float):
        if len(dl.queue) >= self.cfg.buffer:
            dl.drops += 1
            self.dropped += 1
            self._log_q(dl, "drop")
            if not pkt.is_ack and not self.is_tcp:
                self._udp_resolve(pkt.flow, now)
            return
        dl.queue.append(pkt)
        self._log_q(dl, "enq")
        if len(dl.queue) == 1:
            self._push(now + pkt.bits / dl.cap_bps, K_TX, dl, 0)

    def _emit(self, pkt: _Pkt, now: float):
        """Packet enters the network on the first link of its path."""
        self.emitted += 1
        dl = self.dirlinks[(pkt.path[0], pkt.path[1])]
        self._enqueue(dl, pkt, now)

    def _on_tx(self, dl: _DirLink, now: float):
        pkt = dl.queue.popleft()
        self._log_q(dl, "deq")
        if dl.queue:
            self._push(now + dl.queue[0].bits / dl.cap_bps, K_TX, dl, 0)
        self._push(now + dl.prop_s, K_PROP, pkt, 0)

    def _on_prop(self, pkt: _Pkt, now: float):
        node = pkt.path[pkt.hop]
        if pkt.hop == len(pkt.path) - 1:
            self._deliver(pkt, now)
            return
        nxt = self.dirlinks[(node, pkt.path[pkt.hop + 1])]
        pkt.hop += 1
        self._enqueue(nxt, pkt, now)

    # -- delivery and protocol logic -----------------------------------------

    def _deliver(self, pkt: _Pkt, now: float):
        self.delivered += 1
        fl = pkt.flow
        if pkt.is_ack:
            self._tcp_on_ack(fl, pkt.ack_value, now)
            return
        self.delays.append(now - pkt.entry)
        if not self.is_tcp:
            self._udp_resolve(fl, now)
            return
        seq = pkt.seq_num
        if not fl.received[seq]:
            fl.received[seq] = True
            while fl.rcv_cum < fl.size and fl.received[fl.rcv_cum]:
                fl.rcv_cum += 1
            if fl.rcv_cum == fl.size and not fl.completed:
                self._complete(fl, now)
        ack = _Pkt(fl, -1, self.ack_bits, True, fl.rpath, now, ack_value=fl.rcv_cum)
        self._emit(ack, now)

    def _complete(self, fl: _FlowState, now: float):
        fl.completed = True
        self.completed += 1
        self.fct.append((fl.fid, now - fl.arrival))

    def _udp_resolve(self, fl: _FlowState, now: float):
        """A UDP packet left the network (delivered or dropped)."""
        fl.resolved += 1
        if fl.resolved == fl.size and not fl.completed:
            self._complete(fl, now)

    # -- UDP source ------------------------------------------------------------

    def _on_app(self, fl: _FlowState, now: float):
        pkt = _Pkt(fl, fl.next_idx, self.data_bits, False, fl.path, now)
        fl.next_idx += 1
        self._emit(pkt, now)
        if fl.next_idx < fl.size:
            self._push(now + self.udp_interval, K_APP, fl, 0)

    # -- TCP-lite ---------------------------------------------------------------

    def _timer_start(self, fl: _FlowState, now: float):
        fl.timer_gen += 1
        fl.timer_on = True
        self._push(now + fl.rto, K_TIMEOUT, fl, fl.timer_gen)

    def _timer_stop(self, fl: _FlowState):
        fl.timer_gen += 1
        fl.timer_on = False

    def _send_data(self, fl: _FlowState, seq, now, is_retx):
        pkt = _Pkt(fl, seq, self.data_bits, False, fl.path, now)
        fl.send_time[seq] = now
        if is_retx:
            fl.retx[seq] = True
        self._emit(pkt, now)

    def _send_window(self, fl: _FlowState, now: float):
        while fl.next_new < fl.size and fl.next_new - fl.cum_acked < int(fl.cwnd):
            self._send_data(fl, fl.next_new, now, is_retx=False)
            fl.next_new += 1
            if not fl.timer_on:
                self._timer_start(fl, now)

    def _rtt_sample(self, fl: _FlowState, sample: float):
        if fl.srtt is None:
            fl.srtt = sample
            fl.rttvar = sample / 2.0
        else:
            fl.rttvar = 0.75 * fl.rttvar + 0.25 * abs(fl.srtt - sample)
            fl.srtt = 0.875 * fl.srtt + 0.125 * sample
        fl.rto = min(max(fl.srtt + 4.0 * fl.rttvar, self.min_rto), self.max_rto)

    def _tcp_on_ack(self, fl: _FlowState, ack: int, now: float):
        if fl.cum_acked >= fl.size:
            return
        if ack > fl.cum_acked:
            newest = ack - 1
            if not fl.retx[newest]:
                self._rtt_sample(fl, now - fl.send_time[newest])
            fl.cum_acked = ack
            fl.dupacks = 0
            if fl.cwnd < fl.ssthresh:
                fl.cwnd += 1.0
            else:
                fl.cwnd += 1.0 / fl.cwnd
            if fl.cum_acked >= fl.size:
                self._timer_stop(fl)
                return
            self._send_window(fl, now)
            self._timer_start(fl, now)      # restart for the oldest outstanding
        else:
            fl.dupacks += 1
            if fl.dupacks == 3:
                fl.dupacks = 0
                fl.ssthresh = max(fl.cwnd / 2.0, 2.0)
                fl.cwnd = fl.ssthresh
                self._send_data(fl, fl.cum_acked, now, is_retx=True)
                self._timer_start(fl, now)

    def _on_timeout(self, fl: _FlowState, gen: int, now: float):
        if gen != fl.timer_gen or not fl.timer_on or fl.cum_acked >= fl.size:
            return
        fl.ssthresh = max(fl.cwnd / 2.0, 2.0)
        fl.cwnd = 1.0
        fl.dupacks = 0
        fl.rto = min(fl.rto * 2.0, self.max_rto)
        self._send_data(fl, fl.cum_acked, now, is_retx=True)
        self._timer_start(fl, now)

    def _on_flow(self, fl: _FlowState, now: float):
        if self.is_tcp:
            fl.send_time = [0.0] * fl.size
            fl.retx = [False] * fl.size
            fl.received = [False] * fl.size
            fl.rto = self.initial_rto
            self._send_window(fl, now)
        else:
            self._push(now, K_APP, fl, 0)

    # -- main loop -----------------------------------------------------------

    def run(self) -> SimResults:
        horizon = self.cfg.horizon
        heap = self.heap
        handlers = {
            K_FLOW: self._on_flow,
            K_APP: self._on_app,
            K_TX: self._on_tx,
            K_PROP: self._on_prop,
        }
        while heap and heap[0][0] <= horizon:
            time, _, kind, obj, extra = heappop(heap)
            if kind == K_TIMEOUT:
                self._on_timeout(obj, extra, time)
            else:
                handlers[kind](obj, time)
        residual = sum(len(dl.queue) for dl in self.dirlinks.values())
        residual += sum(1 for ev in heap if ev[2] == K_PROP)
        drops = {dl.key: dl.drops for dl in self.dirlinks.values() if dl.drops}
        return SimResults(
            alpha=self.cfg.alpha,
            horizon=horizon,
            fct=self.fct,
            delays=np.array(self.delays),
            completed_flows=self.completed,
            total_flows=len(self.flows),
            drops=drops,
            emitted=self.emitted,
            delivered=self.delivered,
            dropped=self.dropped,
            residual=residual,
            queue_paths=self.queue_paths,
        )


def run(t: Topology, schedule: FlowSchedule, cfg: SimConfig) -> SimResults:
    """Simulate a flow schedule on a weighted topology."""
    return _Engine(t, schedule, cfg).run()
