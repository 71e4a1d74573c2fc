"""Standalone figure scripts.

figkit timeseries --input trace.csv [--summary summary.json] --out fig.png
figkit ensemble --input results_dir --out fig.png
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .io import SchemaError, read_ensemble_csv, read_summary_json, read_trace_csv
from .plots import plot_ensemble, plot_timeseries


def cmd_timeseries(args) -> int:
    try:
        trace = read_trace_csv(args.input)
        summary = read_summary_json(args.summary) if args.summary else None
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    plot_timeseries(trace, args.out, summary)
    print(f"wrote {args.out}")
    return 0


def cmd_ensemble(args) -> int:
    root = Path(args.input)
    ensemble_paths = sorted(root.glob("*_ensemble.csv"))
    summary_paths = sorted(root.glob("*_summary.json"))
    if not ensemble_paths:
        print(f"error: no *_ensemble.csv files under {root}", file=sys.stderr)
        return 2
    try:
        ensembles = [read_ensemble_csv(p) for p in ensemble_paths]
        summaries = [read_summary_json(p) for p in summary_paths]
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    plot_ensemble(ensembles, summaries, args.out)
    print(f"wrote {args.out}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="figkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    ts = sub.add_parser("timeseries", help="per-trial multi-panel figure")
    ts.add_argument("--input", required=True, help="trace CSV path")
    ts.add_argument("--summary", default=None, help="summary JSON for transition markers")
    ts.add_argument("--out", required=True, help="output image path")
    ts.set_defaults(func=cmd_timeseries)

    ens = sub.add_parser("ensemble", help="superimposed ensembles plus final-value KDE")
    ens.add_argument("--input", required=True, help="directory of *_ensemble.csv / *_summary.json")
    ens.add_argument("--out", required=True, help="output image path")
    ens.set_defaults(func=cmd_ensemble)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
