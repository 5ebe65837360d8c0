"""Render per-station time series from simulator trace CSVs.

Consumes only the documented artifact files ({name}_trace.csv written by the
vlsim CLI); no simulation logic lives here.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Dict, List

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

PLOT_KINDS = ("cumulative", "windowed", "burst_length")

_AXES = {
    "cumulative": ("cumulative data (Mbit)", 8e-6),
    "windowed": ("throughput (Mbit/s)", 1e-6),
    "burst_length": ("mean burst length (ms)", 1e-3),
}

_COLUMN = {
    "cumulative": "cumulative_bytes",
    "windowed": "window_throughput_bps",
    "burst_length": "mean_burst_len",
}


@dataclass
class FigureSpec:
    preset: str                  # name of the run, e.g. "fig2b"
    kind: str                    # one of PLOT_KINDS
    data_dir: str = "out"
    out_path: str = ""           # defaults to {preset}_{kind}.png

    def __post_init__(self):
        if self.kind not in PLOT_KINDS:
            raise ValueError(f"unknown plot kind {self.kind!r}; "
                             f"choices: {PLOT_KINDS}")
        if not self.out_path:
            self.out_path = f"{self.preset}_{self.kind}.png"

    @property
    def csv_path(self) -> str:
        return os.path.join(self.data_dir, f"{self.preset}_trace.csv")


def load_series(csv_path: str, column: str) -> Dict[int, List[tuple]]:
    """Per-station [(time_s, value)] from one trace CSV."""
    with open(csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or column not in reader.fieldnames:
            raise ValueError(f"{csv_path}: missing column {column!r}")
        series: Dict[int, List[tuple]] = {}
        for row in reader:
            sid = int(row["station_id"])
            series.setdefault(sid, []).append(
                (float(row["time_s"]), float(row[column])))
    if not series:
        raise ValueError(f"{csv_path}: no data rows")
    return series


def series_labels(series: Dict[int, List[tuple]]) -> List[str]:
    """Legend labels, 'S1'..'Sn' in ascending station order."""
    return [f"S{sid}" for sid in sorted(series)]


def render(spec: FigureSpec) -> str:
    """Draw one figure and return the written image path."""
    series = load_series(spec.csv_path, _COLUMN[spec.kind])
    ylabel, scale = _AXES[spec.kind]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for sid, label in zip(sorted(series), series_labels(series)):
        pts = series[sid]
        ax.plot([t for t, _ in pts], [v * scale for _, v in pts],
                label=label, linewidth=1.2)
    ax.set_xlabel("time (s)")
    ax.set_ylabel(ylabel)
    ax.set_title(f"{spec.preset}: {spec.kind.replace('_', ' ')}")
    ax.grid(True, alpha=0.3)
    ax.legend(ncol=2, fontsize=8)
    fig.tight_layout()
    out_dir = os.path.dirname(spec.out_path)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    fig.savefig(spec.out_path, dpi=110)
    plt.close(fig)
    return spec.out_path


def final_slopes(csv_path: str) -> Dict[int, float]:
    """Average growth rate of the cumulative-data curve per station
    (bytes per second over the full run)."""
    series = load_series(csv_path, "cumulative_bytes")
    slopes = {}
    for sid, pts in series.items():
        t_end, v_end = pts[-1]
        if t_end <= 0:
            raise ValueError(f"{csv_path}: empty time axis for station {sid}")
        slopes[sid] = v_end / t_end
    return slopes
