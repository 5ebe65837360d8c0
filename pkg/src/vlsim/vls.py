"""Credit-ledger fair scheduler: virtual-slot accounting, burst sizing,
clock-speed management and the credit stability predicates."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Optional, Sequence, Tuple, Union

NumberLike = Union[int, float, str, Fraction]

MAX_FRACTION_DIGITS = 6


def parse_ratio(value: NumberLike, what: str = "value") -> Fraction:
    """Turn a weight / clock-speed input into an exact rational.

    Decimal strings are the canonical form; floats are accepted but are
    re-read through their shortest decimal repr, and anything with more
    than 6 fractional digits is rejected so the ledger denominator stays
    bounded.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    text = repr(value) if isinstance(value, float) else str(value).strip()
    if "/" in text:
        return Fraction(text)
    if "e" in text or "E" in text:
        raise ValueError(f"{what}: scientific notation not accepted: {text!r}")
    if "." in text:
        frac_digits = len(text.split(".", 1)[1])
        if frac_digits > MAX_FRACTION_DIGITS:
            raise ValueError(f"{what}: at most {MAX_FRACTION_DIGITS} fractional "
                             f"digits accepted, got {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"{what}: cannot parse {text!r}") from exc


class Metric(enum.Enum):
    PACKETS = "packets"
    BITS = "bits"
    AIR_TIME = "air_time"


def metric_quantum(metric: Metric, payload_bytes: int, airtime_us: int) -> int:
    """Credit spent by one packet, in the active fairness unit."""
    if metric is Metric.PACKETS:
        return 1
    if metric is Metric.BITS:
        return payload_bytes * 8
    return airtime_us


@dataclass
class VlsState:
    """Per-station scheduler ledger.

    credit always equals clock * weight * quantum * virtual_slots - spent,
    kept exact by rational arithmetic.
    """
    station_id: int
    weight: Fraction
    clock: Fraction                      # effective clock speed c
    quantum: int = 1                     # credit units per packet (metric)
    burst_cap: Optional[int] = None      # max packets per burst, None = uncapped
    metric: Metric = Metric.PACKETS
    credit: Fraction = Fraction(0)
    virtual_slots: int = 0               # V_j
    spent: Fraction = field(default=Fraction(0), repr=False)

    def __post_init__(self):
        if self.weight <= 0:
            raise ValueError("weight must be positive")
        if self.clock <= 0:
            raise ValueError("clock speed must be positive")
        if self.burst_cap is not None and self.burst_cap < 1:
            raise ValueError("burst cap must be >= 1 packet")

    @property
    def per_slot_credit(self) -> Fraction:
        return self.clock * self.weight * self.quantum


def on_virtual_slot(state: VlsState) -> VlsState:
    """Account one observed virtual slot (collision, foreign burst, or the
    station's own burst). Idle mini-slots never reach this function."""
    state.virtual_slots += 1
    state.credit += state.per_slot_credit
    return state


def burst_length_on_win(state: VlsState) -> int:
    """Packets to transmit after winning contention.

    Assumes the winning slot itself has already been counted via
    on_virtual_slot. Floor-and-carry: fractional credit stays banked. A
    winner always sends at least one packet, even on empty credit.
    """
    n = state.credit // state.quantum    # floor, exact
    if state.burst_cap is not None and n > state.burst_cap:
        n = state.burst_cap
    if n < 1:
        n = 1
    return int(n)


def charge_acked_packet(state: VlsState) -> VlsState:
    """Debit the ledger for one ACKed packet."""
    state.credit -= state.quantum
    state.spent += state.quantum
    return state


def on_burst_progress(state: VlsState, acked: int, planned: int,
                      aborted: bool = False) -> VlsState:
    """Debit a whole burst at once: only ACKed packets are charged, a lost
    packet aborts the burst and costs nothing."""
    if acked > planned:
        raise ValueError(f"acked {acked} exceeds planned burst {planned}")
    for _ in range(acked):
        charge_acked_packet(state)
    return state


def conservation_holds(state: VlsState) -> bool:
    return state.credit == state.per_slot_credit * state.virtual_slots - state.spent


@dataclass
class ApCounter:
    """Access-point side of the piggyback variant: one global virtual-slot
    counter plus the value last reported to each station."""
    v: int = 0
    last_reported: Dict[int, int] = field(default_factory=dict)

    def on_virtual_slot(self) -> None:
        self.v += 1

    def record_and_piggyback(self, station_id: int) -> int:
        prev = self.last_reported.get(station_id)
        if prev is not None and self.v < prev:
            raise ValueError("virtual slot counter went backward")
        self.last_reported[station_id] = self.v
        return self.v


def ap_variant_burst(weight: int, v_prev: int, v_now: int) -> int:
    """Total burst size for the piggyback variant: the station sends its
    weight up front, then weight * (slots elapsed - 1) more."""
    if v_now <= v_prev:
        raise ValueError(f"piggybacked count must advance: {v_prev} -> {v_now}")
    return weight + weight * (v_now - v_prev - 1)


@dataclass
class ClockSpeedTable:
    """Latest clock-speed broadcast per sender; everyone follows the lowest."""
    default: Fraction = Fraction(1)
    entries: Dict[int, Fraction] = field(default_factory=dict)

    @property
    def effective(self) -> Fraction:
        return min([self.default, *self.entries.values()])


def merge_clock_speeds(table: ClockSpeedTable, sender_id: int,
                       c_j: Fraction) -> ClockSpeedTable:
    """Store a broadcast, replacing the sender's previous value."""
    if c_j <= 0:
        raise ValueError("clock speed broadcast must be positive")
    table.entries[sender_id] = c_j
    return table


class ClockPolicy(enum.Enum):
    KNOWN_N = "known_n"
    DELAY_TARGET = "delay_target"
    AP_CONTROLLED = "ap_controlled"


def compute_c_broadcast(policy: ClockPolicy, *, n: Optional[int] = None,
                        c0: Optional[Fraction] = None,
                        target_delay: Optional[Fraction] = None,
                        current_delay: Optional[Fraction] = None,
                        value: Optional[Fraction] = None) -> Fraction:
    """Pick the clock speed a station announces to the network."""
    if policy is ClockPolicy.KNOWN_N:
        if not n:
            raise ValueError("station count must be positive")
        return Fraction(1, n)
    if policy is ClockPolicy.DELAY_TARGET:
        if current_delay is None or current_delay == 0:
            raise ValueError("measured delay must be positive")
        return c0 * Fraction(target_delay) / Fraction(current_delay)
    if value is None or value <= 0:
        raise ValueError("controller value must be positive")
    return value


class Stability(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"


def stability_threshold(weight, clock, win_prob) -> float:
    return float(weight) * float(clock) / win_prob


def stability_check(burst_cap: Optional[int], weight, clock,
                    win_prob: float) -> Stability:
    """Credit stays bounded iff the cap exceeds weight*clock/win_prob.
    No cap means every win drains the ledger, so always stable."""
    if not 0.0 <= win_prob <= 1.0:
        raise ValueError("win probability must be in [0,1]")
    if win_prob == 0.0:
        return Stability.UNSTABLE  # never wins: credit grows without bound
    if burst_cap is None:
        return Stability.STABLE
    return (Stability.STABLE
            if burst_cap > stability_threshold(weight, clock, win_prob)
            else Stability.UNSTABLE)


def stability_check_markov(burst_cap: Optional[int], weight, clock,
                           win_prob: float,
                           good_period_samples: Sequence[float]) -> Stability:
    """Time-varying channel version: the spendable burst is limited by both
    the cap and the good-period length, so E[min(cap, T)] must clear the
    same threshold."""
    if not good_period_samples:
        raise ValueError("need at least one good-period sample")
    if not 0.0 < win_prob <= 1.0:
        raise ValueError("win probability must be in (0,1]")
    cap = math.inf if burst_cap is None else burst_cap
    mean_spendable = sum(min(cap, t) for t in good_period_samples) / len(good_period_samples)
    return (Stability.STABLE
            if mean_spendable > stability_threshold(weight, clock, win_prob)
            else Stability.UNSTABLE)
