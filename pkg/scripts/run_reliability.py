#!/usr/bin/env python3
"""Delivery, latency and message cost over the density x loss x algorithm grid.

    python scripts/run_reliability.py scripts/configs/desk.cfg results/reliability.csv
"""
import argparse
from pathlib import Path
import sys
import time

from georoute.experiments import emit_csv, load_spec, run_experiment


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("spec")
    ap.add_argument("out")
    ap.add_argument("--runs", type=int, help="override runs_per_point")
    args = ap.parse_args(argv)
    overrides = {"runs_per_point": args.runs} if args.runs else {}
    spec = load_spec(args.spec, **overrides)
    t0 = time.perf_counter()
    records = run_experiment(spec)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    emit_csv(records, args.out)
    print(f"{'point':<34} {'delivery':>9} {'latency':>9} {'cost':>9}")
    for rec in records:
        cells = []
        for col in ("delivery_ratio", "latency_norm", "msg_cost_norm"):
            mean, _ = rec.aggregate(col)
            cells.append("-" if mean is None else f"{mean:.3f}")
        print(f"{rec.point_id:<34} {cells[0]:>9} {cells[1]:>9} {cells[2]:>9}")
    print(f"wrote {args.out} in {time.perf_counter() - t0:.1f}s", file=sys.stderr)


if __name__ == "__main__":
    main()
