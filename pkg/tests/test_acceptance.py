"""Acceptance gate: one test per exit criterion, each driven through the CLI
presets (the credit-process checks use the scheduler ops directly, as an
isolated process). Run with `pytest tests/test_acceptance.py -v -s` to see
one PASS line per criterion.
"""

import csv
import json
import math
import random
import time

import pytest

from vlsim.cli import EXIT_OK, main
from vlsim.vls import (VlsState, burst_length_on_win, on_burst_progress,
                       on_virtual_slot, parse_ratio)

WALK_SEED = 2          # drives both credit walks of the stability criterion
DIVERGENCE_SEED = 55

_RESULTS = {}


def _passed(name):
    print(f"[PASS] {name}")


@pytest.fixture(scope="session")
def outdir(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


def run_preset(outdir, name, seed=None, duration=None, tag=None):
    """Invoke the CLI and return (summary dict, csv path, elapsed seconds)."""
    tag = tag or (name if seed is None else f"{name}_s{seed}")
    key = (name, seed, duration)
    if key in _RESULTS:
        return _RESULTS[key]
    sub = outdir / tag
    argv = ["--preset", name, "--out", str(sub)]
    if seed is not None:
        argv += ["--seed", str(seed)]
    if duration is not None:
        argv += ["--duration", str(duration)]
    t0 = time.time()
    rc = main(argv)
    elapsed = time.time() - t0
    assert rc == EXIT_OK, f"preset {name} failed with exit code {rc}"
    summary = json.loads((sub / f"{name}_summary.json").read_text())
    result = (summary, sub / f"{name}_trace.csv", elapsed)
    _RESULTS[key] = result
    return result


def station_rates(summary):
    return {s["station_id"]: s["throughput_bps"] for s in summary["per_station"]}


def spread(values):
    return (max(values) - min(values)) / min(values)


def windows_from_csv(csv_path, window_s=1.0):
    """Per-station bits/s over consecutive windows, rebinned from the trace."""
    rows = []
    with open(csv_path, newline="") as fh:
        for r in csv.DictReader(fh):
            rows.append((float(r["time_s"]), int(r["station_id"]),
                         int(r["cumulative_bytes"])))
    per_station = {}
    for t, sid, cum in rows:
        per_station.setdefault(sid, []).append((t, cum))
    out = {}
    for sid, series in per_station.items():
        prev = 0
        edge = window_s
        vals = []
        for t, cum in series:
            if t + 1e-9 >= edge:
                vals.append((cum - prev) * 8 / window_s)
                prev = cum
                edge += window_s
        out[sid] = vals
    return out


def mean_window_jain(csv_path):
    wins = windows_from_csv(csv_path)
    ids = sorted(wins)
    n = min(len(wins[s]) for s in ids)
    vals = []
    for k in range(n):
        xs = [wins[s][k] for s in ids]
        total = sum(xs)
        if total > 0:
            vals.append(total * total / (len(xs) * sum(x * x for x in xs)))
    return sum(vals) / len(vals)


# ---------------------------------------------------------------------------
# Weighted fairness exactness (10 stations, weights 1 2 1 2 3 4 1 2 5 3, c=1)
# ---------------------------------------------------------------------------

def test_weighted_fairness_exactness(outdir):
    summary, _, elapsed = run_preset(outdir, "fig3b")
    err = summary["weighted_fairness_error"]
    assert err <= 0.02, f"weighted fairness error {err:.4f} exceeds 0.02"
    assert elapsed < 30, f"fig3b took {elapsed:.1f}s, budget is 30s"
    _passed(f"weighted fairness: error {err:.4f} <= 0.02, runtime {elapsed:.1f}s")


# ---------------------------------------------------------------------------
# Short-term fairness improvement over plain backoff, 5 seeds
# ---------------------------------------------------------------------------

def test_short_term_fairness_improvement(outdir):
    for seed in (1, 2, 3, 4, 5):
        _, csv_b, _ = run_preset(outdir, "fig2b", seed=seed)
        _, csv_a, _ = run_preset(outdir, "fig2a", seed=seed)
        jain_b = mean_window_jain(csv_b)
        jain_a = mean_window_jain(csv_a)
        assert jain_b >= 0.99, f"seed {seed}: scheduler jain {jain_b:.4f} < 0.99"
        assert jain_b > jain_a, (f"seed {seed}: scheduler jain {jain_b:.4f} "
                                 f"not above plain backoff {jain_a:.4f}")
    _passed("short-term fairness: 1s-window jain >= 0.99 and above plain "
            "backoff on 5 shared seeds")


# ---------------------------------------------------------------------------
# Capture: unfairness without the scheduler, fairness plus throughput with it
# ---------------------------------------------------------------------------

def test_capture_unfairness_and_recovery(outdir):
    summary_a, _, _ = run_preset(outdir, "fig5a")
    rates = station_rates(summary_a)
    strong = rates[1]
    others = [v for k, v in rates.items() if k != 1]
    ratio = strong / (sum(others) / len(others))
    assert ratio >= 2.0, f"strong station only {ratio:.2f}x the others"

    summary_b, _, _ = run_preset(outdir, "fig5b")
    rates_b = list(station_rates(summary_b).values())
    sp = spread(rates_b)
    assert sp <= 0.05, f"scheduler left a {sp:.3f} spread under capture"

    summary_nc, _, _ = run_preset(outdir, "fig5b_nocap")
    total_cap = summary_b["total_throughput_bps"]
    total_nocap = summary_nc["total_throughput_bps"]
    assert total_cap >= total_nocap, (
        f"capture lost throughput: {total_cap:.0f} < {total_nocap:.0f}")
    _passed(f"capture: {ratio:.2f}x skew without scheduler; spread "
            f"{sp:.3%} with it; aggregate kept ({total_cap/1e6:.2f} vs "
            f"{total_nocap/1e6:.2f} Mbit/s)")


# ---------------------------------------------------------------------------
# Channel errors: fairness held, aggregate close to the error-free run
# ---------------------------------------------------------------------------

def test_channel_error_fairness_and_throughput(outdir):
    summary_b, _, _ = run_preset(outdir, "fig6b")
    rates = list(station_rates(summary_b).values())
    sp = spread(rates)
    assert sp <= 0.05, f"noisy-channel spread {sp:.3f} exceeds 5%"

    summary_c, _, _ = run_preset(outdir, "fig6c")
    ratio = (summary_b["total_throughput_bps"]
             / summary_c["total_throughput_bps"])
    assert ratio >= 0.90, f"noisy run kept only {ratio:.3f} of clean throughput"
    _passed(f"channel errors: spread {sp:.3%}, throughput ratio {ratio:.3f}")


# ---------------------------------------------------------------------------
# Credit stability dichotomy (isolated credit process, p=0.25, W=1, c=1)
# ---------------------------------------------------------------------------

def _credit_walk(cap, win_p, n_slots, seed):
    """Drive the real scheduler ops with Bernoulli contention wins; returns
    (max credit, least-squares slope, slope t-statistic)."""
    rng = random.Random(seed)
    state = VlsState(station_id=1, weight=parse_ratio("1"),
                     clock=parse_ratio("1"), burst_cap=cap)
    max_credit = 0.0
    sx = sy = sxx = sxy = syy = 0.0
    for t in range(n_slots):
        on_virtual_slot(state)
        if rng.random() < win_p:
            n = burst_length_on_win(state)
            on_burst_progress(state, acked=n, planned=n)
        c = float(state.credit)
        if c > max_credit:
            max_credit = c
        x = float(t)
        sx += x
        sy += c
        sxx += x * x
        sxy += x * c
        syy += c * c
    nn = float(n_slots)
    denom = nn * sxx - sx * sx
    slope = (nn * sxy - sx * sy) / denom
    intercept = (sy - slope * sx) / nn
    sse = max(syy - intercept * sy - slope * sxy, 0.0)
    se = math.sqrt(max(sse / (nn - 2), 1e-300) * nn / denom)
    return max_credit, slope, slope / se


def test_stability_stable_cap_keeps_max_credit_below_50():
    # The stability threshold is W*c/p = 4, so a cap of 5 is on the stable
    # side. KNOWN RED: the bound of 50 is not attainable for this process -
    # its running max over 1e6 slots sits near 75-110 for every seed (the
    # capped walk's excursions are ~4x fatter than the uncapped walk the
    # bound appears calibrated on). The check is stated faithfully anyway;
    # the companion drift tests establish the actual dichotomy.
    max_credit, slope, _ = _credit_walk(5, 0.25, 10**6, WALK_SEED)
    assert max_credit < 50, (
        f"max credit {max_credit:.0f} over 1e6 slots (bound 50); drift slope "
        f"{slope:.2e} confirms stability, but the stated bound is exceeded")
    _passed(f"stability (cap 5): max credit {max_credit:.0f} < 50")


def test_stability_tight_cap_has_positive_drift():
    max_credit, slope, t_stat = _credit_walk(4, 0.25, 10**6, WALK_SEED)
    z_99 = 2.326
    assert slope > 0, f"expected positive credit drift, got {slope:.3e}"
    assert t_stat > z_99, f"slope not significant: t={t_stat:.1f}"
    _passed(f"stability (cap 4): credit diverges, slope {slope:.2e} "
            f"(t={t_stat:.0f}), max {max_credit:.0f}")


def test_stability_divergence_probability():
    # P(credit reaches G before a win spends it) ~ (1-p)^(G/(W c))
    G, p, episodes = 20, 0.25, 200_000
    rng = random.Random(DIVERGENCE_SEED)
    reached = 0
    for _ in range(episodes):
        state = VlsState(station_id=1, weight=parse_ratio("1"),
                         clock=parse_ratio("1"))
        while True:
            on_virtual_slot(state)
            if rng.random() < p:
                n = burst_length_on_win(state)
                on_burst_progress(state, acked=n, planned=n)
                break
            if state.credit >= G:
                reached += 1
                break
    p_hat = reached / episodes
    p_true = (1 - p) ** (G / (1 * 1))
    se = math.sqrt(p_hat * (1 - p_hat) / episodes)
    assert abs(p_hat - p_true) <= 3 * se, (
        f"divergence probability {p_hat:.5f} vs {p_true:.5f} "
        f"(3 MC standard errors = {3 * se:.5f})")
    _passed(f"divergence law: {p_hat:.5f} vs (1-p)^G = {p_true:.5f} "
            f"within 3 standard errors")


# ---------------------------------------------------------------------------
# Two collision domains: starvation with fixed bursts, parity with adaptive
# ---------------------------------------------------------------------------

def test_multidomain_fixed_bursts_starve_bridge_station(outdir):
    summary, _, _ = run_preset(outdir, "fig7b")
    rates = station_rates(summary)
    bridge = rates[3]
    others = [v for k, v in rates.items() if k != 3]
    ratio = bridge / (sum(others) / len(others))
    assert ratio < 0.25, f"bridge station got {ratio:.3f} of the others' mean"
    _passed(f"two domains, fixed bursts: bridge station at {ratio:.3f} "
            f"of the others' mean (< 0.25)")


def test_multidomain_adaptive_bursts_reach_parity(outdir):
    summary, csv_path, _ = run_preset(outdir, "fig7c")
    wins = windows_from_csv(csv_path)
    post = {sid: sum(w[2:]) / len(w[2:]) for sid, w in wins.items()}
    sp = spread(list(post.values()))
    assert sp <= 0.10, f"post-transient spread {sp:.3f} exceeds 10%"
    bursts = {s["station_id"]: s["mean_burst_len_us"]
              for s in summary["per_station"]}
    assert 1000.0 <= bursts[3] <= 2100.0, (
        f"bridge station mean burst {bursts[3]:.0f}us outside [1.0, 2.1]ms")
    for sid in (1, 2, 4, 5):
        assert 300.0 <= bursts[sid] <= 800.0, (
            f"station {sid} mean burst {bursts[sid]:.0f}us outside [0.3, 0.8]ms")
    _passed(f"two domains, adaptive: spread {sp:.3%}, bridge burst "
            f"{bursts[3]/1000:.2f}ms, others "
            f"{min(bursts[s] for s in (1,2,4,5))/1000:.2f}-"
            f"{max(bursts[s] for s in (1,2,4,5))/1000:.2f}ms")


# ---------------------------------------------------------------------------
# Determinism: byte-identical CSV for identical (preset, seed)
# ---------------------------------------------------------------------------

def test_determinism_byte_identical_csv(outdir, tmp_path):
    from vlsim.presets import PRESETS
    for name in sorted(PRESETS):
        a, b = tmp_path / f"{name}_a", tmp_path / f"{name}_b"
        for sub in (a, b):
            rc = main(["--preset", name, "--seed", "17", "--duration", "2",
                       "--out", str(sub)])
            assert rc == EXIT_OK
        bytes_a = (a / f"{name}_trace.csv").read_bytes()
        bytes_b = (b / f"{name}_trace.csv").read_bytes()
        assert bytes_a == bytes_b, f"{name}: CSV differs between identical runs"
    _passed("determinism: byte-identical CSV for every preset at a fixed seed")


# ---------------------------------------------------------------------------
# Credit ledger matches the direct slot-counter formulation
# ---------------------------------------------------------------------------

def test_ledger_matches_direct_slot_counter():
    rng = random.Random(99)
    for weight in (1, 2, 3, 5):
        state = VlsState(station_id=1, weight=parse_ratio(str(weight)),
                         clock=parse_ratio("1"))
        m = 1
        checked = 0
        for _ in range(10_000):
            on_virtual_slot(state)
            if rng.random() < 0.1:       # this slot is a win
                n_ledger = burst_length_on_win(state)
                assert n_ledger == m * weight, (
                    f"W={weight}: ledger burst {n_ledger} != m*W = {m * weight}")
                on_burst_progress(state, acked=n_ledger, planned=n_ledger)
                assert state.credit == 0
                m = 1
                checked += 1
            else:
                m += 1
        assert checked > 900
    _passed("ledger equivalence: burst lengths equal m*W slot-for-slot "
            "over 10^4-slot traces")
