"""Command line front end: validate a scenario, run it, write CSV + JSON.

Exit codes: 0 ok, 1 validation failure, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import config as config_mod
from . import engine, metrics, presets

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="vlsim",
        description="CSMA/CA contention simulator with a distributed "
                    "variable-length fair scheduler")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", metavar="FILE",
                     help="YAML scenario file to run")
    src.add_argument("--preset", metavar="NAME",
                     help=f"canned experiment, one of {', '.join(sorted(presets.PRESETS))}")
    p.add_argument("--seed", type=int, default=None,
                   help="override the scenario seed")
    p.add_argument("--duration", type=float, default=None, metavar="S",
                   help="override the run length in seconds")
    p.add_argument("--out", default="out", metavar="DIR",
                   help="output directory (default: ./out)")
    p.add_argument("--summary-only", action="store_true",
                   help="write only the summary JSON, skip the trace CSV")
    return p


def run_scenario(cfg: config_mod.ScenarioConfig, name: str, out_dir: str,
                 summary_only: bool = False) -> dict:
    """Run one validated scenario and write its artifacts. Returns the
    summary dict; paths are {out}/{name}_trace.csv and {name}_summary.json."""
    trace = engine.run(cfg)
    os.makedirs(out_dir, exist_ok=True)
    if not summary_only:
        csv_path = os.path.join(out_dir, f"{name}_trace.csv")
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            trace.write_csv(fh)
    summary = metrics.summary_dict(trace)
    summary["scenario"] = name
    summary["seed"] = cfg.seed
    summary["duration_s"] = cfg.duration_s
    json_path = os.path.join(out_dir, f"{name}_summary.json")
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def main(argv: Optional[list] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.preset:
            name = args.preset
            try:
                cfg = presets.build(name, seed=args.seed,
                                    duration_s=args.duration)
            except KeyError as exc:
                print(f"error: {exc.args[0]}", file=sys.stderr)
                return EXIT_VALIDATION
        else:
            name = os.path.splitext(os.path.basename(args.scenario))[0]
            try:
                cfg = config_mod.load_file(args.scenario)
            except (OSError, ValueError) as exc:
                print(f"error: cannot load scenario: {exc}", file=sys.stderr)
                return EXIT_VALIDATION
            if args.seed is not None:
                cfg.seed = args.seed
            if args.duration is not None:
                cfg.duration_s = args.duration

        errors, warnings = config_mod.validate(cfg)
        for w in warnings:
            print(f"warning: {w}", file=sys.stderr)
        if errors:
            for e in errors:
                print(f"error: {e}", file=sys.stderr)
            return EXIT_VALIDATION

        summary = run_scenario(cfg, name, args.out,
                               summary_only=args.summary_only)
    except Exception as exc:  # noqa: BLE001 - surface as runtime failure
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    total = summary["total_throughput_bps"]
    print(f"{name}: total throughput {total / 1e6:.3f} Mbit/s, "
          f"outputs in {args.out}/")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
