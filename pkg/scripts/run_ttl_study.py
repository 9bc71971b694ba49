#!/usr/bin/env python3
"""MCFR-Steiner delivery ratio as a function of the hop limit."""
import argparse
from pathlib import Path

from georoute.experiments import emit_csv, load_spec, ttl_sweep


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("spec")
    ap.add_argument("out")
    ap.add_argument("--runs", type=int)
    args = ap.parse_args(argv)
    spec = load_spec(args.spec, **({"runs_per_point": args.runs} if args.runs else {}))
    if not spec.ttl_values:
        ap.error("spec has no ttl_values")
    records = ttl_sweep(spec, spec.ttl_values)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    emit_csv(records, args.out)
    for rec in records:
        print(f"{rec.point_id:<34} delivery={rec.mean_delivery_ratio:.3f}")


if __name__ == "__main__":
    main()
