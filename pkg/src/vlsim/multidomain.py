"""Throughput-feedback scheduling for graphs with more than one collision
domain: sensing topology, neighbor throughput monitoring and the multiplicative
burst-length update."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple


class ContentionGraph:
    """Symmetric carrier-sensing relation between stations.

    A station always belongs to its own neighborhood; collision domains are
    the maximal cliques of the sensing graph.
    """

    def __init__(self, stations: Iterable[int],
                 edges: Iterable[Tuple[int, int]] = ()):
        self.stations = sorted(set(stations))
        self._adj: Dict[int, set] = {s: set() for s in self.stations}
        for a, b in edges:
            self.add_edge(a, b)

    @classmethod
    def full(cls, stations: Iterable[int]) -> "ContentionGraph":
        g = cls(stations)
        for i, a in enumerate(g.stations):
            for b in g.stations[i + 1:]:
                g.add_edge(a, b)
        return g

    def add_edge(self, a: int, b: int) -> None:
        if a not in self._adj or b not in self._adj:
            raise ValueError(f"edge ({a},{b}) names an unknown station")
        if a == b:
            return
        self._adj[a].add(b)
        self._adj[b].add(a)

    def senses(self, a: int, b: int) -> bool:
        return a == b or b in self._adj[a]

    def neighbors(self, s: int) -> FrozenSet[int]:
        """Neighborhood including the station itself."""
        return frozenset(self._adj[s] | {s})

    def sensed_set(self, s: int) -> FrozenSet[int]:
        """Stations whose transmissions s can carrier-sense (excluding s)."""
        return frozenset(self._adj[s])

    def is_single_domain(self) -> bool:
        n = len(self.stations)
        return all(len(self._adj[s]) == n - 1 for s in self.stations)

    def collision_domains(self) -> List[FrozenSet[int]]:
        """Maximal cliques, Bron-Kerbosch without pivoting (graphs are tiny)."""
        cliques: List[FrozenSet[int]] = []

        def extend(r: set, p: set, x: set) -> None:
            if not p and not x:
                cliques.append(frozenset(r))
                return
            for v in sorted(p):
                extend(r | {v}, p & self._adj[v], x & self._adj[v])
                p = p - {v}
                x = x | {v}

        extend(set(), set(self.stations), set())
        return sorted(cliques, key=lambda c: sorted(c))


@dataclass
class BurstController:
    """Multiplicative burst-length adaptation toward the weighted share.

    burst(t+1) = burst(t) - alpha * burst(t) * (S_j / sum S_k - W_j / sum W_k),
    clamped; the fixed point is exactly the target throughput ratio.
    """
    burst_us: float
    weight: float
    neighborhood_weight: float           # sum of weights over N_j including self
    alpha: float = 0.1
    update_period_us: int = 4_000
    averaging_window_us: int = 40_000
    min_burst_us: float = 1.0
    max_burst_us: float = 10_000.0
    decaying_alpha: bool = False         # alpha(t) = alpha / t if enabled
    updates_done: int = 0

    def __post_init__(self):
        if self.burst_us <= 0:
            raise ValueError("initial burst length must be positive")
        if self.neighborhood_weight <= 0 or self.weight <= 0:
            raise ValueError("weights must be positive")


def update_burst(ctrl: BurstController, own_rate: float,
                 neighborhood_rate: float) -> float:
    """Apply one controller step and return the new burst length (us).

    `neighborhood_rate` must include the station's own rate. A silent
    neighborhood carries no information, so the length is left unchanged.
    """
    ctrl.updates_done += 1
    if neighborhood_rate <= 0:
        return ctrl.burst_us
    alpha = ctrl.alpha / ctrl.updates_done if ctrl.decaying_alpha else ctrl.alpha
    share_error = own_rate / neighborhood_rate - ctrl.weight / ctrl.neighborhood_weight
    new_burst = ctrl.burst_us - alpha * ctrl.burst_us * share_error
    ctrl.burst_us = min(ctrl.max_burst_us, max(ctrl.min_burst_us, new_burst))
    return ctrl.burst_us


class ThroughputMonitor:
    """Sliding-window delivery records for a station and its neighbors
    (perfect overhearing inside the sensing relation)."""

    def __init__(self, station_id: int, neighborhood: FrozenSet[int],
                 window_us: int):
        self.station_id = station_id
        self.neighborhood = neighborhood
        self.window_us = window_us
        self._records: Dict[int, Deque[Tuple[int, int]]] = {
            s: deque() for s in sorted(neighborhood)}

    def record(self, sender: int, t_us: int, bits: int) -> None:
        if sender in self._records:
            self._records[sender].append((t_us, bits))

    def _prune(self, now_us: int) -> None:
        horizon = now_us - self.window_us
        for q in self._records.values():
            while q and q[0][0] <= horizon:
                q.popleft()

    def observe(self, now_us: int) -> Tuple[float, float]:
        """(own rate, neighborhood rate incl. self) in bits/s, averaged over
        the trailing window (clipped at t=0)."""
        self._prune(now_us)
        span_us = min(self.window_us, now_us)
        if span_us <= 0:
            return 0.0, 0.0
        own = sum(b for _, b in self._records[self.station_id])
        total = sum(b for q in self._records.values() for _, b in q)
        scale = 1e6 / span_us
        return own * scale, total * scale


def observe_throughput(mon: ThroughputMonitor, now_us: int) -> Tuple[float, float]:
    return mon.observe(now_us)


def update_times(period_us: int, station_ids: Sequence[int],
                 until_us: int) -> List[Tuple[int, int]]:
    """Deterministic controller invocation schedule: one update per station
    per period, phase-offset by station rank to avoid lockstep."""
    if period_us <= 0:
        raise ValueError("update period must be positive")
    ids = sorted(station_ids)
    out: List[Tuple[int, int]] = []
    for rank, sid in enumerate(ids):
        offset = (rank * period_us) // max(1, len(ids))
        t = period_us + offset
        while t <= until_us:
            out.append((t, sid))
            t += period_us
    out.sort()
    return out
