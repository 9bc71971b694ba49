#!/usr/bin/env python3
"""Delivery slots for a fixed source/target cluster as the surrounding field grows.

MCFR should stay flat; per-target GFG unicast may not.
"""
import argparse

from georoute.experiments import locality_study


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--small", type=int, default=300)
    ap.add_argument("--large", type=int, default=1200)
    ap.add_argument("--density", type=float, default=7.0)
    ap.add_argument("--instances", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    res = locality_study(args.small, args.large, args.density, instances=args.instances,
                         seed=args.seed)
    print(f"nodes          {res.n_small:>8} {res.n_large:>8}")
    print(f"mcfr mean slot {res.mcfr_mean_slots[0]:>8.2f} {res.mcfr_mean_slots[1]:>8.2f}")
    print(f"gfg worst slot {res.gfg_worst_slots[0]:>8} {res.gfg_worst_slots[1]:>8}")
    print(f"mcfr relative change {res.mcfr_relative_change:.1%}")


if __name__ == "__main__":
    main()
