"""Throughput and fairness instrumentation over completed simulation traces."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Dict, IO, List, Optional, Sequence

CSV_COLUMNS = ("time_s", "station_id", "window_throughput_bps",
               "cumulative_packets", "cumulative_bytes", "credit",
               "mean_burst_len", "virtual_slots")


@dataclass
class TraceRow:
    time_s: float
    station_id: int
    window_throughput_bps: float
    cumulative_packets: int
    cumulative_bytes: int
    credit: float
    mean_burst_len: float        # mean airtime span of this station's bursts, us
    virtual_slots: int


@dataclass
class StationSummary:
    station_id: int
    weight: float
    throughput_bps: float
    packets: int
    bytes: int
    mean_burst_len_us: float
    virtual_slots: int


@dataclass
class MetricsTrace:
    duration_s: float
    sample_period_s: float
    rows: List[TraceRow] = field(default_factory=list)
    per_station: Dict[int, StationSummary] = field(default_factory=dict)
    events: Optional[list] = None        # MediumEvent log, tests only

    def station_ids(self) -> List[int]:
        return sorted(self.per_station)

    def write_csv(self, fh: IO[str]) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.rows:
            writer.writerow([f"{r.time_s:.3f}", r.station_id,
                             f"{r.window_throughput_bps:.3f}",
                             r.cumulative_packets, r.cumulative_bytes,
                             f"{r.credit:.6f}", f"{r.mean_burst_len:.3f}",
                             r.virtual_slots])


def jain_index(values: Sequence[float]) -> float:
    """(sum x)^2 / (n * sum x^2); 1.0 is perfect fairness, 1/n total capture."""
    xs = list(values)
    if not xs or all(x == 0 for x in xs):
        raise ValueError("jain index undefined for an all-zero vector")
    if any(x < 0 for x in xs):
        raise ValueError("jain index needs non-negative inputs")
    total = sum(xs)
    return (total * total) / (len(xs) * sum(x * x for x in xs))


def weighted_fairness_error(throughputs: Sequence[float],
                            weights: Sequence[float]) -> float:
    """Max relative deviation of the per-weight rates from their mean."""
    if len(throughputs) != len(weights):
        raise ValueError("throughputs and weights must align")
    if any(w <= 0 for w in weights):
        raise ValueError("weights must be positive")
    ratios = [t / w for t, w in zip(throughputs, weights)]
    mean = sum(ratios) / len(ratios)
    if mean == 0:
        return 0.0
    return max(abs(r / mean - 1.0) for r in ratios)


def windowed_throughput(trace: MetricsTrace,
                        window_s: float) -> Dict[int, List[float]]:
    """Per-station delivered bits/s over consecutive non-overlapping windows,
    rebinned from the cumulative byte column."""
    if window_s <= 0:
        raise ValueError("window must be positive")
    by_station: Dict[int, List[TraceRow]] = {}
    for row in trace.rows:
        by_station.setdefault(row.station_id, []).append(row)
    out: Dict[int, List[float]] = {}
    for sid, rows in by_station.items():
        series = []
        prev_bytes = 0
        next_edge = window_s
        eps = 1e-9
        for row in rows:
            if row.time_s + eps >= next_edge:
                series.append((row.cumulative_bytes - prev_bytes) * 8 / window_s)
                prev_bytes = row.cumulative_bytes
                next_edge += window_s
        out[sid] = series
    return out


def jain_over_windows(trace: MetricsTrace, window_s: float = 1.0) -> List[float]:
    """Jain index across stations for each throughput window; windows where
    nobody delivered anything are skipped."""
    per_station = windowed_throughput(trace, window_s)
    ids = sorted(per_station)
    if not ids:
        return []
    n_windows = min(len(per_station[s]) for s in ids)
    indices = []
    for k in range(n_windows):
        xs = [per_station[s][k] for s in ids]
        if any(x > 0 for x in xs):
            indices.append(jain_index(xs))
    return indices


def mean_jain_1s(trace: MetricsTrace) -> float:
    indices = jain_over_windows(trace, 1.0)
    if not indices:
        raise ValueError("trace too short for 1 s fairness windows")
    return sum(indices) / len(indices)


def total_throughput_bps(trace: MetricsTrace) -> float:
    return sum(s.throughput_bps for s in trace.per_station.values())


def summary_dict(trace: MetricsTrace) -> dict:
    stations = [trace.per_station[sid] for sid in trace.station_ids()]
    try:
        jain = mean_jain_1s(trace)
    except ValueError:
        jain = None
    if stations and all(s.weight > 0 for s in stations):
        wfe = weighted_fairness_error([s.throughput_bps for s in stations],
                                      [s.weight for s in stations])
    else:
        wfe = None
    return {
        "jain_1s_mean": jain,
        "weighted_fairness_error": wfe,
        "total_throughput_bps": total_throughput_bps(trace),
        "per_station": [
            {
                "station_id": s.station_id,
                "weight": s.weight,
                "throughput_bps": s.throughput_bps,
                "packets": s.packets,
                "bytes": s.bytes,
                "mean_burst_len_us": s.mean_burst_len_us,
                "virtual_slots": s.virtual_slots,
            }
            for s in stations
        ],
    }
