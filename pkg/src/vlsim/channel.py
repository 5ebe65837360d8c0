"""Reception-outcome models: Bernoulli loss, two-state Markov channel, capture."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Tuple


class ChannelState(enum.Enum):
    GOOD = "good"
    BAD = "bad"


class CaptureClass(enum.Enum):
    NORMAL = "normal"
    STRONG = "strong"


class Outcome(enum.Enum):
    DELIVERED = "delivered"
    LOST = "lost"              # channel error, single transmitter
    COLLISION_LOST = "collision_lost"


@dataclass
class ReceptionOutcome:
    kind: Outcome
    station_id: Optional[int] = None  # set only for DELIVERED

    def __post_init__(self):
        if self.kind is Outcome.DELIVERED and self.station_id is None:
            raise ValueError("DELIVERED outcome must carry a station id")


def stationary_loss_prob(lambda_g: float, lambda_b: float) -> float:
    """Long-run fraction of time the two-state channel spends in BAD.

    lambda_g / lambda_b are the exit rates (transitions per second) out of
    the good / bad state; dwell times are exponential with those rates.
    """
    if lambda_g <= 0 or lambda_b <= 0:
        raise ValueError("transition rates must be positive")
    return lambda_g / (lambda_g + lambda_b)


class GilbertElliott:
    """Two-state Markov channel with exponentially distributed dwell times.

    The state sequence is advanced lazily: `state_at(t)` consumes dwell draws
    from the seeded rng until the dwell covering `t` is reached. Queries must
    move forward in time.
    """

    def __init__(self, lambda_g: float, lambda_b: float, rng: random.Random,
                 initial: ChannelState = ChannelState.GOOD):
        if lambda_g <= 0 or lambda_b <= 0:
            raise ValueError("transition rates must be positive")
        self.lambda_g = lambda_g  # exits per second out of GOOD
        self.lambda_b = lambda_b  # exits per second out of BAD
        self.rng = rng
        self.state = initial
        self.last_query_us = 0.0
        self.next_transition_us = self._draw_dwell_us()

    def _rate_per_us(self) -> float:
        rate = self.lambda_g if self.state is ChannelState.GOOD else self.lambda_b
        return rate / 1e6

    def _draw_dwell_us(self) -> float:
        return self.rng.expovariate(self._rate_per_us())

    def state_at(self, t_us) -> ChannelState:
        if t_us < self.last_query_us:
            raise ValueError("channel sampled backward in time "
                             f"({t_us} < {self.last_query_us})")
        self.last_query_us = t_us
        while self.next_transition_us <= t_us:
            self.state = (ChannelState.BAD if self.state is ChannelState.GOOD
                          else ChannelState.GOOD)
            self.next_transition_us += self._draw_dwell_us()
        return self.state

    def stationary_loss_prob(self) -> float:
        return stationary_loss_prob(self.lambda_g, self.lambda_b)


class PerfectChannel:
    """Channel that never loses a packet."""

    def packet_ok(self, t_us) -> bool:
        return True


class BernoulliChannel:
    """IID per-packet loss with probability p."""

    def __init__(self, p: float, rng: random.Random):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"loss probability must be in [0,1], got {p}")
        self.p = p
        self.rng = rng

    def packet_ok(self, t_us) -> bool:
        return self.rng.random() >= self.p


class MarkovChannel:
    """Gilbert-Elliott channel adapter: a packet survives iff its start
    instant falls in the GOOD state."""

    def __init__(self, chain: GilbertElliott):
        self.chain = chain

    def packet_ok(self, t_us) -> bool:
        return self.chain.state_at(t_us) is ChannelState.GOOD


def resolve_reception(txs: Iterable[Tuple[int, CaptureClass]],
                      channel_ok: Dict[int, bool],
                      capture_enabled: bool) -> ReceptionOutcome:
    """Decide what the receiver decodes out of one overlapping set.

    `txs` lists (station_id, capture class) for every transmission that
    overlapped at the receiver. `channel_ok` gives the per-station channel
    verdict for the packet (only consulted for the station that would be
    decoded). A single transmitter is decoded iff its channel is good. With
    two or more, exactly one STRONG transmitter is decoded (capture), again
    subject to its own channel; anything else is a plain collision.
    """
    txs = list(txs)
    if not txs:
        raise ValueError("resolve_reception needs at least one transmission")
    if len(txs) == 1:
        sid, _ = txs[0]
        if channel_ok.get(sid, True):
            return ReceptionOutcome(Outcome.DELIVERED, sid)
        return ReceptionOutcome(Outcome.LOST)
    strong = [sid for sid, cls in txs if cls is CaptureClass.STRONG]
    if capture_enabled and len(strong) == 1:
        sid = strong[0]
        if channel_ok.get(sid, True):
            return ReceptionOutcome(Outcome.DELIVERED, sid)
        return ReceptionOutcome(Outcome.LOST)
    return ReceptionOutcome(Outcome.COLLISION_LOST)
