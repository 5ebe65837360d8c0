"""Deterministic event-driven CSMA/CA kernel.

Time is integer microseconds. Every run is a pure function of
(scenario, seed): the event queue breaks ties by insertion order, stations
are always iterated in ascending id, and all randomness flows from
per-station streams derived from the master seed.

Carrier sensing is evaluated per station against a contention graph, so a
fully connected graph reproduces slot-aligned single-domain DCF while
partial graphs give each station its own view of the medium (and genuine
hidden-terminal behavior between domains).
"""

from __future__ import annotations

import heapq
import itertools
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

from . import channel as chan_mod
from . import vls as vls_mod
from .channel import CaptureClass, Outcome, resolve_reception
from .metrics import MetricsTrace, StationSummary, TraceRow
from .multidomain import (BurstController, ContentionGraph, ThroughputMonitor,
                          update_burst, update_times)

AP_ID = 0  # reserved node id for the access point / uplink sink


# ---------------------------------------------------------------------------
# PHY and MAC primitives
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhyParams:
    """802.11b DSSS defaults at the 11 Mbps rate."""
    slot_time: int = 20            # us
    sifs: int = 10                 # us
    difs: int = 50                 # us
    data_rate: int = 11_000_000    # bits/s
    packet_payload: int = 1000     # bytes
    ack_duration: int = 112        # us
    header_overhead: int = 192     # us, PLCP preamble+header etc.

    def __post_init__(self):
        for name in ("slot_time", "sifs", "difs", "data_rate",
                     "packet_payload", "ack_duration"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.header_overhead < 0:
            raise ValueError("header_overhead must be non-negative")
        if self.difs <= self.sifs:
            raise ValueError("DIFS must exceed SIFS")

    @property
    def data_airtime(self) -> int:
        return packet_airtime(self, self.packet_payload)

    @property
    def exchange_airtime(self) -> int:
        """One DATA-ACK exchange, excluding the SIFS separating exchanges."""
        return self.data_airtime + self.sifs + self.ack_duration


def packet_airtime(phy: PhyParams, n_bytes: int) -> int:
    """Microseconds one data packet occupies the medium."""
    if n_bytes <= 0:
        raise ValueError("packet size must be positive")
    bits = 8 * n_bytes
    return phy.header_overhead + -(-bits * 1_000_000 // phy.data_rate)


@dataclass
class StationMac:
    """802.11 DCF contention state."""
    station_id: int
    cw_min: int = 32
    cw_max: int = 1024
    cw: int = 0
    backoff_counter: int = 0
    retry_count: int = 0
    backlogged: bool = True

    def __post_init__(self):
        if self.cw_min < 1 or self.cw_max < self.cw_min:
            raise ValueError("need 1 <= cw_min <= cw_max")
        if self.cw == 0:
            self.cw = self.cw_min


def draw_backoff(mac: StationMac, rng: random.Random) -> int:
    """Uniform draw in [0, cw); leaves the window untouched."""
    return rng.randrange(mac.cw)


def apply_beb(mac: StationMac, success: bool) -> StationMac:
    """Binary exponential backoff: double on any loss, reset on success."""
    if success:
        mac.cw = mac.cw_min
        mac.retry_count = 0
    else:
        mac.cw = min(2 * mac.cw, mac.cw_max)
        mac.retry_count += 1
    return mac


# ---------------------------------------------------------------------------
# Medium events (observable busy periods)
# ---------------------------------------------------------------------------

IDLE_SLOT = "idle_slot"
SUCCESS_BURST = "success_burst"
COLLISION = "collision"
FAILED_TX = "failed_tx"


@dataclass
class MediumEvent:
    kind: str
    start: int = 0
    duration: int = 0
    station_id: Optional[int] = None          # SUCCESS_BURST / FAILED_TX
    n_packets: int = 0                        # delivered packets in the burst
    station_set: Tuple[int, ...] = ()         # COLLISION members
    aborted: bool = False                     # burst cut short by a loss
    losers: Tuple[int, ...] = ()              # capture losers folded into a burst

    def __post_init__(self):
        if self.kind == SUCCESS_BURST and self.n_packets < 1:
            raise ValueError("a success burst carries at least one packet")
        if self.kind == COLLISION and len(self.station_set) < 2:
            raise ValueError("a collision involves at least two stations")


@dataclass(frozen=True)
class SlotResolution:
    """What a backoff slot turned into; contention sets still need the
    channel model to decide capture vs collision."""
    kind: str                     # 'idle' | 'attempt' | 'contention'
    stations: Tuple[int, ...] = ()


def resolve_slot(contenders: Set[int]) -> SlotResolution:
    ids = tuple(sorted(contenders))
    if not ids:
        return SlotResolution("idle")
    if len(ids) == 1:
        return SlotResolution("attempt", ids)
    return SlotResolution("contention", ids)


# ---------------------------------------------------------------------------
# Event queue / clock
# ---------------------------------------------------------------------------

class SimClock:
    """Monotone integer-microsecond clock."""

    def __init__(self):
        self.now = 0

    def advance(self, t: int) -> None:
        if t < self.now:
            raise RuntimeError(f"clock moved backward: {t} < {self.now}")
        self.now = t


class EventQueue:
    """Min-heap keyed by (time, insertion sequence): pop order is total and
    reproducible for identical push sequences."""

    def __init__(self):
        self._heap: list = []
        self._seq = itertools.count()

    def push(self, time: int, payload: tuple) -> None:
        heapq.heappush(self._heap, (time, next(self._seq), payload))

    def pop(self) -> Tuple[int, tuple]:
        time, _, payload = heapq.heappop(self._heap)
        return time, payload

    def peek_time(self) -> int:
        return self._heap[0][0]

    def __len__(self) -> int:
        return len(self._heap)


# ---------------------------------------------------------------------------
# Runtime structures
# ---------------------------------------------------------------------------

DATA = "data"
ACK = "ack"

CONTEND = "contend"
TRANSMIT = "transmit"
SILENT = "silent"          # never contends (the AP, or a receive-only peer)

_FAR_PAST = -1 << 40


@dataclass
class _Tx:
    tx_id: int
    sender: int
    dest: int
    kind: str
    start: int
    end: int
    pkt_index: int = 0                     # 1-based position within a burst
    overlap: Set[int] = field(default_factory=set)
    piggyback_v: Optional[int] = None


@dataclass
class _Burst:
    planned: int
    start: int
    acked: int = 0
    last_tx_end: int = 0
    extension_applied: bool = False


class _Node:
    """Per-station runtime state (MAC + scheduler + sensing bookkeeping)."""

    def __init__(self, sid: int, mac: StationMac, rng: random.Random,
                 channel, capture_class: CaptureClass, dest: Optional[int]):
        self.sid = sid
        self.mac = mac
        self.rng = rng
        self.channel = channel
        self.capture_class = capture_class
        self.dest = dest                  # None for receive-only nodes
        self.sensed: Set[int] = set()     # senders this node carrier-senses
        self.state = CONTEND if dest is not None else SILENT
        # contention timing
        self.counter = 0
        self.anchor = 0
        self.skip = 0
        self.expire_at: Optional[int] = None
        self.epoch = 0
        self.earliest = 0                 # recovery bound (ACK timeout)
        # sensing bookkeeping
        self.active_sensed = 0
        self.busy_end = _FAR_PAST
        self.period_mark = _FAR_PAST
        # scheduler attachments
        self.vls: Optional[vls_mod.VlsState] = None
        self.ap_weight: Optional[int] = None      # piggyback-variant weight
        self.ap_v_prev: Optional[int] = None
        self.ctrl: Optional[BurstController] = None
        self.fixed_burst_us: Optional[float] = None
        self.monitor: Optional[ThroughputMonitor] = None
        self.ap_counter: Optional[vls_mod.ApCounter] = None
        self.plan: Optional[_Burst] = None
        # stats
        self.v_count = 0
        self.acked_packets = 0
        self.acked_bytes = 0
        self.window_bits = 0
        self.burst_count = 0
        self.burst_airtime_sum = 0
        self.burst_packets_sum = 0
        self.weight_f = 1.0


class Simulation:
    """One deterministic run of a scenario."""

    def __init__(self, cfg, record_events: bool = False):
        self.cfg = cfg
        self.phy: PhyParams = cfg.phy
        self.capture_enabled: bool = cfg.capture
        self.record_events = record_events
        self.clock = SimClock()
        self.q = EventQueue()
        self.active: Dict[int, _Tx] = {}
        self._tx_ids = itertools.count(1)
        self.events: List[MediumEvent] = []
        self._collision_emitted: Set[tuple] = set()
        self._capture_losers: Dict[int, Set[int]] = {}
        self._build_nodes()

    # -- construction -------------------------------------------------------

    def _build_nodes(self) -> None:
        cfg = self.cfg
        ids = [s.id for s in cfg.stations]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate station ids")
        if AP_ID in ids:
            raise ValueError(f"station id {AP_ID} is reserved for the AP")
        master = random.Random(cfg.seed)
        self.nodes: Dict[int, _Node] = {}

        if cfg.topology is None:
            graph = ContentionGraph.full([AP_ID] + sorted(ids))
            flows = {sid: AP_ID for sid in ids}
        else:
            graph = ContentionGraph(sorted(ids), cfg.topology.edges)
            flows = dict(cfg.topology.flows)
        self.graph = graph
        self.single_domain = cfg.topology is None

        # AP node first, then stations ascending: stream assignment is fixed.
        if self.single_domain:
            ap_mac = StationMac(AP_ID, backlogged=False)
            ap = _Node(AP_ID, ap_mac, random.Random(master.getrandbits(64)),
                       chan_mod.PerfectChannel(), CaptureClass.NORMAL, None)
            ap.ap_counter = vls_mod.ApCounter()
            self.nodes[AP_ID] = ap

        clock_table = vls_mod.ClockSpeedTable()
        adaptive_ids = []
        for scfg in sorted(cfg.stations, key=lambda s: s.id):
            backoff_rng = random.Random(master.getrandbits(64))
            channel_rng = random.Random(master.getrandbits(64))
            mac = StationMac(scfg.id, cw_min=scfg.cw_min, cw_max=scfg.cw_max)
            ch = self._make_channel(scfg, channel_rng)
            node = _Node(scfg.id, mac, backoff_rng, ch,
                         CaptureClass(scfg.capture_class), flows.get(scfg.id))
            node.weight_f = float(vls_mod.parse_ratio(scfg.weight, "weight"))
            self.nodes[scfg.id] = node
            if scfg.vls_enabled:
                if cfg.topology is not None:
                    raise ValueError("virtual-slot scheduling needs a single "
                                     "collision domain; use the topology "
                                     "controller instead")
                if scfg.vls_c is not None:
                    vls_mod.merge_clock_speeds(
                        clock_table, scfg.id, vls_mod.parse_ratio(scfg.vls_c, "c"))
            if cfg.topology is not None and cfg.topology.controller.mode == "adaptive":
                adaptive_ids.append(scfg.id)

        effective_c = clock_table.effective
        quantum_by_metric = {
            vls_mod.Metric.PACKETS: 1,
            vls_mod.Metric.BITS: self.phy.packet_payload * 8,
            vls_mod.Metric.AIR_TIME: self.phy.data_airtime,
        }
        for scfg in sorted(cfg.stations, key=lambda s: s.id):
            node = self.nodes[scfg.id]
            node.sensed = set(graph.sensed_set(scfg.id))
            if scfg.vls_enabled:
                metric = vls_mod.Metric(scfg.vls_metric)
                weight = vls_mod.parse_ratio(scfg.weight, "weight")
                if scfg.vls_variant == "ap":
                    if weight.denominator != 1:
                        raise ValueError("ap variant needs an integer weight")
                    node.ap_weight = int(weight)
                else:
                    node.vls = vls_mod.VlsState(
                        station_id=scfg.id, weight=weight, clock=effective_c,
                        quantum=quantum_by_metric[metric],
                        burst_cap=scfg.vls_burst_cap, metric=metric)
            elif cfg.topology is not None:
                ctl = cfg.topology.controller
                if ctl.mode == "adaptive":
                    nbh_weight = sum(self.nodes[k].weight_f
                                     for k in graph.neighbors(scfg.id))
                    node.ctrl = BurstController(
                        burst_us=ctl.b_init_ms * 1000.0,
                        weight=node.weight_f,
                        neighborhood_weight=nbh_weight,
                        alpha=ctl.alpha,
                        update_period_us=int(ctl.update_period_ms * 1000),
                        averaging_window_us=int(ctl.averaging_window_ms * 1000),
                        min_burst_us=float(self.phy.exchange_airtime),
                        max_burst_us=ctl.b_max_ms * 1000.0)
                else:
                    node.fixed_burst_us = ctl.b_init_ms * 1000.0
        if self.single_domain:
            ap = self.nodes[AP_ID]
            ap.sensed = {s.id for s in cfg.stations}
        if adaptive_ids:
            window = int(cfg.topology.controller.averaging_window_ms * 1000)
            for sid in adaptive_ids:
                self.nodes[sid].monitor = ThroughputMonitor(
                    sid, graph.neighbors(sid), window)
        self._adaptive_ids = adaptive_ids

    def _make_channel(self, scfg, rng: random.Random):
        if scfg.channel_mode == "perfect":
            return chan_mod.PerfectChannel()
        if scfg.channel_mode == "bernoulli":
            return chan_mod.BernoulliChannel(scfg.channel_p, rng)
        chain = chan_mod.GilbertElliott(scfg.channel_lambda_g,
                                        scfg.channel_lambda_b, rng)
        return chan_mod.MarkovChannel(chain)

    # -- sensing helpers ----------------------------------------------------

    def _sensors_of(self, sender: int):
        for sid in sorted(self.nodes):
            node = self.nodes[sid]
            if sid == sender or sender in node.sensed:
                yield node

    def _sensed_plus_self(self, sid: int) -> Set[int]:
        return self.nodes[sid].sensed | {sid}

    def _count_vslot(self, node: _Node) -> None:
        node.v_count += 1
        if node.vls is not None and node.mac.backlogged:
            vls_mod.on_virtual_slot(node.vls)
        if node.ap_counter is not None:
            node.ap_counter.on_virtual_slot()

    def _note_new_period(self, node: _Node, start: int, end: int) -> None:
        """Merge a transmission into the node's view of busy periods; a gap of
        at least DIFS opens a new period, which is one virtual slot."""
        if start >= node.busy_end + self.phy.difs:
            if node.period_mark != start:
                self._count_vslot(node)
                node.period_mark = start
        if end > node.busy_end:
            node.busy_end = end

    def _freeze(self, node: _Node, t: int) -> None:
        """Suspend a pending countdown at time t, keeping only fully elapsed
        idle slots (and only those past the recovery bound)."""
        elapsed = (t - node.anchor - self.phy.difs) // self.phy.slot_time
        consumed = max(0, elapsed - node.skip)
        if consumed > node.counter:
            consumed = node.counter
        node.counter -= consumed
        node.mac.backoff_counter = node.counter
        node.expire_at = None
        node.epoch += 1

    def _schedule_expire(self, node: _Node, idle_start: int) -> None:
        node.anchor = idle_start
        base = idle_start + self.phy.difs
        if node.earliest > base:
            node.skip = -(-(node.earliest - base) // self.phy.slot_time)
        else:
            node.skip = 0
        node.expire_at = base + (node.skip + node.counter) * self.phy.slot_time
        node.epoch += 1
        self.q.push(node.expire_at, ("expire", node.sid, node.epoch))

    # -- transmissions ------------------------------------------------------

    def _create_tx(self, sender: int, dest: int, kind: str, start: int,
                   pkt_index: int = 0) -> _Tx:
        airtime = self.phy.data_airtime if kind == DATA else self.phy.ack_duration
        tx = _Tx(next(self._tx_ids), sender, dest, kind, start, start + airtime,
                 pkt_index)
        # overlap bookkeeping against everything in flight
        for u in self.active.values():
            if u.end > tx.start and u.start < tx.end and u.sender != tx.sender:
                if kind == DATA and u.sender in self._sensed_plus_self(dest):
                    tx.overlap.add(u.sender)
                if u.kind == DATA and tx.sender in self._sensed_plus_self(u.dest):
                    u.overlap.add(tx.sender)
        self.active[tx.tx_id] = tx
        for node in self._sensors_of(sender):
            self._note_new_period(node, tx.start, tx.end)
            node.active_sensed += 1
            if (node.state == CONTEND and node.expire_at is not None
                    and node.expire_at > tx.start):
                self._freeze(node, tx.start)
        self.q.push(tx.end, ("data_end" if kind == DATA else "ack_end", tx.tx_id))
        return tx

    def _end_tx(self, tx: _Tx) -> None:
        """Refcount bookkeeping after a transmission leaves the air; nodes
        whose local medium went quiet re-enter the countdown."""
        now = self.clock.now
        for node in self._sensors_of(tx.sender):
            node.active_sensed -= 1
            if (node.active_sensed == 0 and node.state == CONTEND
                    and node.mac.backlogged):
                self._schedule_expire(node, now)

    # -- burst lifecycle ----------------------------------------------------

    def _burst_length(self, node: _Node) -> int:
        if node.vls is not None:
            return vls_mod.burst_length_on_win(node.vls)
        if node.ap_weight is not None:
            return node.ap_weight
        burst_us = None
        if node.ctrl is not None:
            burst_us = node.ctrl.burst_us
        elif node.fixed_burst_us is not None:
            burst_us = node.fixed_burst_us
        if burst_us is not None:
            return max(1, int(burst_us // self.phy.exchange_airtime))
        return 1

    def _begin_burst(self, node: _Node) -> None:
        now = self.clock.now
        node.state = TRANSMIT
        node.expire_at = None
        # the winning slot counts before the burst length is computed
        if now >= node.busy_end + self.phy.difs and node.period_mark != now:
            self._count_vslot(node)
            node.period_mark = now
        n = self._burst_length(node)
        node.plan = _Burst(planned=n, start=now, last_tx_end=now)
        self._create_tx(node.sid, node.dest, DATA, now, pkt_index=1)

    def _finish_burst(self, node: _Node, aborted: bool,
                      collision_set: Optional[Tuple[int, ...]] = None) -> None:
        plan = node.plan
        node.plan = None
        node.state = CONTEND
        node.burst_count += 1
        node.burst_airtime_sum += plan.last_tx_end - plan.start
        node.burst_packets_sum += plan.acked
        if not self.record_events:
            return
        duration = plan.last_tx_end - plan.start
        if plan.acked >= 1:
            losers = tuple(sorted(self._capture_losers.pop(plan.start, ())))
            self.events.append(MediumEvent(
                SUCCESS_BURST, plan.start, duration, station_id=node.sid,
                n_packets=plan.acked, aborted=aborted, losers=losers))
        elif collision_set is not None and len(collision_set) >= 2:
            key = (plan.start, tuple(sorted(collision_set)))
            if key not in self._collision_emitted:
                self._collision_emitted.add(key)
                self.events.append(MediumEvent(
                    COLLISION, plan.start, duration,
                    station_set=tuple(sorted(collision_set))))
        else:
            self.events.append(MediumEvent(
                FAILED_TX, plan.start, duration, station_id=node.sid))

    def _abort_after_loss(self, node: _Node, collided: bool,
                          members: Tuple[int, ...]) -> None:
        now = self.clock.now
        apply_beb(node.mac, success=False)
        node.counter = node.mac.backoff_counter = draw_backoff(node.mac, node.rng)
        node.earliest = now + self.phy.sifs + self.phy.ack_duration
        self._finish_burst(node, aborted=node.plan.acked > 0,
                           collision_set=members if collided else None)

    # -- event handlers -----------------------------------------------------

    def _on_expire(self, sid: int, epoch: int) -> None:
        node = self.nodes[sid]
        if node.epoch != epoch or node.state != CONTEND:
            return
        self._begin_burst(node)

    def _on_data_end(self, tx_id: int) -> None:
        tx = self.active.pop(tx_id)
        node = self.nodes[tx.sender]
        ok = node.channel.packet_ok(tx.start)
        members = tuple(sorted({tx.sender} | tx.overlap))
        txset = [(sid, self.nodes[sid].capture_class) for sid in members]
        outcome = resolve_reception(txset, {tx.sender: ok}, self.capture_enabled)
        delivered = (outcome.kind is Outcome.DELIVERED
                     and outcome.station_id == tx.sender)
        node.plan.last_tx_end = tx.end
        if delivered:
            ack = self._create_tx(tx.dest, tx.sender, ACK,
                                  self.clock.now + self.phy.sifs,
                                  pkt_index=tx.pkt_index)
            ap = self.nodes[tx.dest].ap_counter
            if (ap is not None and node.ap_weight is not None
                    and tx.pkt_index == node.ap_weight):
                ack.piggyback_v = ap.record_and_piggyback(tx.sender)
        else:
            if (self.record_events and len(members) >= 2
                    and outcome.kind is Outcome.DELIVERED):
                # a stronger overlapping transmitter captured the receiver
                self._capture_losers.setdefault(tx.start, set()).add(tx.sender)
            self._abort_after_loss(node, collided=len(members) >= 2,
                                   members=members)
        self._end_tx(tx)

    def _on_ack_end(self, tx_id: int) -> None:
        ack = self.active.pop(tx_id)
        node = self.nodes[ack.dest]          # the data sender
        plan = node.plan
        plan.acked += 1
        plan.last_tx_end = ack.end
        node.acked_packets += 1
        node.acked_bytes += self.phy.packet_payload
        bits = self.phy.packet_payload * 8
        node.window_bits += bits
        if node.vls is not None:
            vls_mod.charge_acked_packet(node.vls)
        apply_beb(node.mac, success=True)
        if self._adaptive_ids:
            for sid in self._adaptive_ids:
                self.nodes[sid].monitor.record(node.sid, self.clock.now, bits)
        if ack.piggyback_v is not None and not plan.extension_applied:
            plan.extension_applied = True
            v_now = ack.piggyback_v
            if node.ap_v_prev is not None:
                total = vls_mod.ap_variant_burst(node.ap_weight,
                                                 node.ap_v_prev, v_now)
                plan.planned = total
            node.ap_v_prev = v_now
        if plan.acked < plan.planned:
            self._create_tx(node.sid, node.dest, DATA,
                            self.clock.now + self.phy.sifs,
                            pkt_index=plan.acked + 1)
        else:
            node.counter = node.mac.backoff_counter = draw_backoff(node.mac, node.rng)
            node.earliest = self.clock.now
            self._finish_burst(node, aborted=False)
        self._end_tx(ack)

    def _on_ctrl(self, sid: int) -> None:
        node = self.nodes[sid]
        own, total = node.monitor.observe(self.clock.now)
        update_burst(node.ctrl, own, total)

    def _on_sample(self, prev_us: int, now_us: int,
                   trace: MetricsTrace) -> None:
        span_s = (now_us - prev_us) / 1e6
        for sid in sorted(self.nodes):
            node = self.nodes[sid]
            if sid == AP_ID:
                continue
            credit = float(node.vls.credit) if node.vls is not None else 0.0
            mean_burst = (node.burst_airtime_sum / node.burst_count
                          if node.burst_count else 0.0)
            trace.rows.append(TraceRow(
                time_s=now_us / 1e6, station_id=sid,
                window_throughput_bps=node.window_bits / span_s if span_s else 0.0,
                cumulative_packets=node.acked_packets,
                cumulative_bytes=node.acked_bytes,
                credit=credit, mean_burst_len=mean_burst,
                virtual_slots=node.v_count))
            node.window_bits = 0

    # -- main loop ----------------------------------------------------------

    def run(self) -> MetricsTrace:
        cfg = self.cfg
        duration_us = int(round(cfg.duration_s * 1_000_000))
        sample_us = int(cfg.sample_period_ms * 1000)
        trace = MetricsTrace(duration_s=cfg.duration_s,
                             sample_period_s=sample_us / 1e6)
        if self.record_events:
            trace.events = self.events
        if duration_us > 0:
            sample_times = list(range(sample_us, duration_us + 1, sample_us))
            if not sample_times or sample_times[-1] != duration_us:
                sample_times.append(duration_us)
            for t in sample_times:
                self.q.push(t, ("sample",))
            if self._adaptive_ids:
                period = self.cfg.topology.controller.update_period_ms
                for t, sid in update_times(int(period * 1000),
                                           self._adaptive_ids, duration_us):
                    self.q.push(t, ("ctrl", sid))
            for sid in sorted(self.nodes):
                node = self.nodes[sid]
                if node.state == CONTEND and node.mac.backlogged:
                    node.counter = node.mac.backoff_counter = draw_backoff(node.mac, node.rng)
                    self._schedule_expire(node, 0)
            prev_sample = 0
            while len(self.q):
                if self.q.peek_time() > duration_us:
                    break
                t, payload = self.q.pop()
                self.clock.advance(t)
                kind = payload[0]
                if kind == "expire":
                    self._on_expire(payload[1], payload[2])
                elif kind == "data_end":
                    self._on_data_end(payload[1])
                elif kind == "ack_end":
                    self._on_ack_end(payload[1])
                elif kind == "ctrl":
                    self._on_ctrl(payload[1])
                elif kind == "sample":
                    self._on_sample(prev_sample, t, trace)
                    prev_sample = t
        for sid in sorted(self.nodes):
            node = self.nodes[sid]
            if sid == AP_ID:
                continue
            mean_burst = (node.burst_airtime_sum / node.burst_count
                          if node.burst_count else 0.0)
            trace.per_station[sid] = StationSummary(
                station_id=sid, weight=node.weight_f,
                throughput_bps=(node.acked_bytes * 8 / cfg.duration_s
                                if cfg.duration_s else 0.0),
                packets=node.acked_packets, bytes=node.acked_bytes,
                mean_burst_len_us=mean_burst, virtual_slots=node.v_count)
        return trace


def run(cfg, record_events: bool = False) -> MetricsTrace:
    """Simulate one scenario to completion; identical (cfg, seed) pairs give
    identical traces."""
    return Simulation(cfg, record_events=record_events).run()
