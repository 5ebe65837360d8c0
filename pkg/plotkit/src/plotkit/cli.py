"""plotkit command line: render one figure, or every kind for a preset."""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from .render import PLOT_KINDS, FigureSpec, render


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="plotkit",
        description="Render per-station figures from vlsim trace CSVs")
    p.add_argument("--data-dir", default="out",
                   help="directory holding {preset}_trace.csv files")
    p.add_argument("--preset", required=True,
                   help="run name whose trace to plot, e.g. fig2b")
    p.add_argument("--kind", choices=list(PLOT_KINDS) + ["all"],
                   default="cumulative")
    p.add_argument("--out", default="",
                   help="output image path (single kind only)")
    return p


def main(argv: Optional[list] = None) -> int:
    args = _parser().parse_args(argv)
    kinds = list(PLOT_KINDS) if args.kind == "all" else [args.kind]
    if args.out and len(kinds) > 1:
        print("error: --out needs a single --kind", file=sys.stderr)
        return 1
    try:
        for kind in kinds:
            spec = FigureSpec(preset=args.preset, kind=kind,
                              data_dir=args.data_dir,
                              out_path=args.out if args.out else "")
            path = render(spec)
            print(f"wrote {path}")
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
