import math
import random

import pytest

from vlsim.channel import (BernoulliChannel, CaptureClass, ChannelState,
                           GilbertElliott, MarkovChannel, Outcome,
                           PerfectChannel, ReceptionOutcome, resolve_reception,
                           stationary_loss_prob)


class TestStationaryLossProb:
    def test_reference_rates(self):
        # 20/s out of good, 113/s out of bad -> 15% of time bad
        assert stationary_loss_prob(20.0, 113.0) == pytest.approx(20 / 133)
        assert stationary_loss_prob(20.0, 113.0) == pytest.approx(0.1504, abs=1e-4)

    def test_symmetric_rates(self):
        assert stationary_loss_prob(7.0, 7.0) == 0.5

    def test_mostly_good(self):
        assert stationary_loss_prob(1.0, 999.0) == pytest.approx(0.001)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            stationary_loss_prob(0.0, 1.0)
        with pytest.raises(ValueError):
            stationary_loss_prob(1.0, -2.0)


class TestGilbertElliott:
    def test_huge_bad_exit_rate_is_always_good(self):
        ch = GilbertElliott(5.0, 1e9, random.Random(1))
        states = {ch.state_at(t) for t in range(0, 2_000_000, 1000)}
        # bad dwells last ~1ns, a 1ms sampling grid never lands in one
        assert states == {ChannelState.GOOD}

    def test_deterministic_per_seed(self):
        a = GilbertElliott(20.0, 113.0, random.Random(7))
        b = GilbertElliott(20.0, 113.0, random.Random(7))
        ts = list(range(0, 3_000_000, 500))
        assert [a.state_at(t) for t in ts] == [b.state_at(t) for t in ts]

    def test_backward_query_rejected(self):
        ch = GilbertElliott(20.0, 113.0, random.Random(1))
        ch.state_at(1000)
        with pytest.raises(ValueError):
            ch.state_at(999)

    def test_long_run_bad_fraction_matches_closed_form(self):
        # Monte-Carlo oracle vs the stationary formula over 10^7 us
        ch = GilbertElliott(20.0, 113.0, random.Random(15))
        step, samples, bad = 100, 0, 0
        for t in range(0, 10_000_000, step):
            samples += 1
            if ch.state_at(t) is ChannelState.BAD:
                bad += 1
        assert abs(bad / samples - ch.stationary_loss_prob()) <= 0.01

    def test_dwell_time_means(self):
        ch = GilbertElliott(20.0, 113.0, random.Random(5))
        good, bad = [], []
        prev = 0.0
        for _ in range(20_000):
            boundary = ch.next_transition_us
            (good if ch.state is ChannelState.GOOD else bad).append(boundary - prev)
            ch.state_at(boundary)
            prev = boundary
        assert len(good) >= 10_000 and len(bad) >= 10_000
        assert sum(good) / len(good) == pytest.approx(1e6 / 20, rel=0.05)
        assert sum(bad) / len(bad) == pytest.approx(1e6 / 113, rel=0.05)

    def test_rejects_nonpositive_rates(self):
        with pytest.raises(ValueError):
            GilbertElliott(0.0, 1.0, random.Random(1))


class TestPacketChannels:
    def test_perfect_never_loses(self):
        ch = PerfectChannel()
        assert all(ch.packet_ok(t) for t in range(100))

    def test_bernoulli_empirical_rate(self):
        p = 0.15
        ch = BernoulliChannel(p, random.Random(3))
        n = 100_000
        losses = sum(0 if ch.packet_ok(0) else 1 for _ in range(n))
        se = math.sqrt(p * (1 - p) / n)
        assert abs(losses / n - p) <= 3 * se

    def test_bernoulli_validates_p(self):
        with pytest.raises(ValueError):
            BernoulliChannel(1.5, random.Random(1))

    def test_markov_adapter_uses_start_state(self):
        chain = GilbertElliott(20.0, 113.0, random.Random(9))
        ch = MarkovChannel(chain)
        ok = ch.packet_ok(0)
        assert ok == (chain.state is ChannelState.GOOD or chain.last_query_us > 0)


class TestResolveReception:
    def test_single_perfect_delivers(self):
        out = resolve_reception([(1, CaptureClass.NORMAL)], {1: True}, False)
        assert out.kind is Outcome.DELIVERED and out.station_id == 1

    def test_single_bad_channel_is_lost(self):
        out = resolve_reception([(1, CaptureClass.NORMAL)], {1: False}, True)
        assert out.kind is Outcome.LOST

    def test_two_normals_collide(self):
        out = resolve_reception(
            [(1, CaptureClass.NORMAL), (2, CaptureClass.NORMAL)], {}, True)
        assert out.kind is Outcome.COLLISION_LOST

    def test_strong_station_captured(self):
        out = resolve_reception(
            [(1, CaptureClass.STRONG), (2, CaptureClass.NORMAL)], {1: True}, True)
        assert out.kind is Outcome.DELIVERED and out.station_id == 1

    def test_capture_disabled_means_collision(self):
        out = resolve_reception(
            [(1, CaptureClass.STRONG), (2, CaptureClass.NORMAL)], {1: True}, False)
        assert out.kind is Outcome.COLLISION_LOST

    def test_two_strongs_collide(self):
        out = resolve_reception(
            [(1, CaptureClass.STRONG), (2, CaptureClass.STRONG)], {}, True)
        assert out.kind is Outcome.COLLISION_LOST

    def test_captured_strong_still_needs_good_channel(self):
        out = resolve_reception(
            [(1, CaptureClass.STRONG), (2, CaptureClass.NORMAL)], {1: False}, True)
        assert out.kind is Outcome.LOST

    def test_empty_set_rejected(self):
        with pytest.raises(ValueError):
            resolve_reception([], {}, True)

    def test_at_most_one_delivery_randomized(self):
        rng = random.Random(42)
        for _ in range(500):
            n = rng.randint(1, 6)
            txs = [(i, rng.choice(list(CaptureClass))) for i in range(n)]
            ok = {i: rng.random() < 0.8 for i in range(n)}
            capture = rng.random() < 0.5
            out = resolve_reception(txs, ok, capture)
            if out.kind is Outcome.DELIVERED:
                assert out.station_id in {sid for sid, _ in txs}
                if len(txs) >= 2:
                    strongs = [sid for sid, c in txs if c is CaptureClass.STRONG]
                    assert capture and strongs == [out.station_id]

    def test_delivered_requires_station_id(self):
        with pytest.raises(ValueError):
            ReceptionOutcome(Outcome.DELIVERED)
