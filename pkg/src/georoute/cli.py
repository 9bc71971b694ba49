"""Command-line front door: fixtures, single simulations, sweeps and TTL tuning.

Every subcommand accepts ``--config FILE`` (key=value lines, ``#`` comments);
explicit flags override file values. The resolved configuration and all
diagnostics go to stderr, machine-readable output to stdout or files.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from pathlib import Path

from .experiments import (ExperimentSpec, emit_csv, parse_kv, run_experiment, spec_from_mapping,
                          spec_to_text, ttl_sweep)
from .netgraph import (dump_graph, gabriel_subgraph, load_graph, make_rng, random_placement,
                       reachable_set, unit_disk_graph)
from .protocols import ALGORITHMS, make_protocol
from .simengine import SimConfig, delivery_ratio_of, latency_of, message_cost_of, run

log = logging.getLogger("georoute")


class UsageError(Exception):
    pass


def default_seed() -> int:
    raw = os.environ.get("GEOROUTE_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"GEOROUTE_SEED must be an integer, got {raw!r}") from None


def _ttl(v: str):
    return None if str(v).lower() in ("inf", "none", "unlimited") else int(v)


def _resolve(args: argparse.Namespace, keys: dict[str, type]) -> dict:
    """Merge config file values with flags (flags win)."""
    conf = {}
    if getattr(args, "config", None):
        conf = parse_kv(Path(args.config).read_text())
    out = {}
    for k, conv in keys.items():
        flag = getattr(args, k, None)
        if flag is not None:
            out[k] = flag
        elif k in conf:
            out[k] = conv(conf[k])
    unknown = set(conf) - set(keys)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return out


def _log_config(name: str, conf: dict) -> None:
    for k in sorted(conf):
        v = conf[k]
        print(f"[{name}] {k}={'inf' if v is None else v}", file=sys.stderr)


# -- subcommands -------------------------------------------------------------

GEN_KEYS = {"density": float, "seed": int, "field_width": float, "field_height": float,
            "unit_radius": float, "out": str}


def cmd_gen_graph(args) -> int:
    conf = {"seed": default_seed(), "field_width": 1000.0, "field_height": 1000.0,
            "unit_radius": 100.0, **_resolve(args, GEN_KEYS)}
    if "density" not in conf or "out" not in conf:
        raise UsageError("gen-graph needs --density and --out")
    if conf["density"] <= 0:
        raise UsageError("density must be positive")
    _log_config("gen-graph", conf)
    rng = make_rng(conf["seed"])
    pts = random_placement(conf["field_width"], conf["field_height"], conf["density"], rng,
                           conf["unit_radius"])
    g = unit_disk_graph(pts, conf["unit_radius"])
    dump_graph(g, conf["out"])
    print(f"wrote {len(g)} nodes, {g.n_edges} edges to {conf['out']}", file=sys.stderr)
    return 0


SIM_KEYS = {"graph": str, "random": lambda v: v.lower() in ("1", "true", "yes"),
            "density": float, "algorithm": str, "loss": float, "ttl": _ttl, "seed": int,
            "target_fraction": float, "transcript": str, "max_slots": int,
            "flush_batches": lambda v: v.lower() in ("1", "true", "yes")}


def cmd_simulate(args) -> int:
    conf = {"seed": default_seed(), "loss": 0.0, "ttl": 55, "target_fraction": 0.05,
            "density": 7.0, "algorithm": "mcfr-steiner", "flush_batches": False,
            **_resolve(args, SIM_KEYS)}
    alg = conf["algorithm"]
    if alg not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {alg!r}; choose from {', '.join(ALGORITHMS)}")
    if not conf.get("graph") and not conf.get("random"):
        raise UsageError("simulate needs a graph file or --random")
    _log_config("simulate", conf)
    rng = make_rng(conf["seed"])
    tree = None
    if conf.get("graph"):
        g, tree = load_graph(conf["graph"])
    else:
        pts = random_placement(1000.0, 1000.0, conf["density"], rng, 100.0)
        g = unit_disk_graph(pts, 100.0)
    if len(g) < 2:
        raise UsageError("graph needs at least two nodes")
    planar = gabriel_subgraph(g)
    if tree is not None:
        source = g.node_at(tree.source)
        targets = [g.node_at(p) for p in tree.targets]
        if source is None or None in targets:
            raise UsageError("tree terminals do not match graph nodes")
    else:
        source = rng.randrange(len(g))
        m = min(len(g) - 1, math.ceil(conf["target_fraction"] * len(g)))
        targets = rng.sample([i for i in range(len(g)) if i != source], m)
    cfg = SimConfig(conf["loss"], conf["ttl"], conf.get("max_slots"),
                    rng_seed=f"{conf['seed']}:channel", flush_batches=conf["flush_batches"])
    tr = run(g, planar, make_protocol(alg, g, planar, source, targets), cfg)
    reach = reachable_set(g, source)
    fmt = lambda v: "" if v is None else format(v, ".12g")
    print(f"algorithm={alg}")
    print(f"nodes={len(g)}")
    print(f"source={source}")
    print(f"targets={','.join(map(str, targets))}")
    print(f"reachable_fraction={fmt(sum(t in reach for t in targets) / len(targets))}")
    print(f"delivery_ratio={fmt(delivery_ratio_of(tr))}")
    print(f"latency_norm={fmt(latency_of(tr, None, g))}")
    print(f"msg_cost_norm={fmt(message_cost_of(tr))}")
    print(f"transmissions={tr.transmissions}")
    print(f"slots={tr.slots}")
    print(f"quiescent={int(tr.quiescent)}")
    if conf.get("transcript"):
        tr.write(conf["transcript"])
        print(f"transcript written to {conf['transcript']}", file=sys.stderr)
    return 0


def _spec_from_args(args) -> ExperimentSpec:
    kv = parse_kv(Path(args.spec).read_text())
    if args.seed is not None:
        kv["master_seed"] = str(args.seed)
    elif "master_seed" not in kv:
        kv["master_seed"] = str(default_seed())
    if args.runs is not None:
        kv["runs_per_point"] = str(args.runs)
    try:
        return spec_from_mapping(kv)
    except (TypeError, ValueError) as e:
        raise UsageError(f"invalid spec: {e}") from None


def cmd_sweep(args) -> int:
    spec = _spec_from_args(args)
    _log_config("sweep", dict(line.split("=", 1) for line in spec_to_text(spec).split()))
    emit_csv(run_experiment(spec), args.out)
    print(f"wrote {args.out}", file=sys.stderr)
    return 0


def cmd_ttl_sweep(args) -> int:
    spec = _spec_from_args(args)
    values = spec.ttl_values
    if args.ttl_values:
        values = tuple(_ttl(v) for v in args.ttl_values.split(","))
    if not values:
        raise UsageError("ttl-sweep needs ttl_values in the experiment spec or --ttl-values")
    _log_config("ttl-sweep", dict(line.split("=", 1) for line in spec_to_text(spec).split()))
    emit_csv(ttl_sweep(spec, values), args.out)
    print(f"wrote {args.out}", file=sys.stderr)
    return 0


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="georoute", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-graph", help="write a random unit-disk graph fixture")
    g.add_argument("--config")
    g.add_argument("--density", type=float)
    g.add_argument("--seed", type=int)
    g.add_argument("--field-width", dest="field_width", type=float)
    g.add_argument("--field-height", dest="field_height", type=float)
    g.add_argument("--unit-radius", dest="unit_radius", type=float)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen_graph)

    s = sub.add_parser("simulate", help="run one multicast session")
    s.add_argument("--config")
    s.add_argument("graph", nargs="?", help="graph dump file")
    s.add_argument("--random", action="store_const", const=True,
                   help="use a fresh random 1000x1000 field instead of a file")
    s.add_argument("--density", type=float)
    s.add_argument("--algorithm", "-a")
    s.add_argument("--loss", type=float)
    s.add_argument("--ttl", type=_ttl, help="hop budget or 'inf'")
    s.add_argument("--seed", type=int)
    s.add_argument("--target-fraction", dest="target_fraction", type=float)
    s.add_argument("--max-slots", dest="max_slots", type=int)
    s.add_argument("--flush-batches", dest="flush_batches", action="store_const", const=True)
    s.add_argument("--transcript", help="write the event log here")
    s.set_defaults(func=cmd_simulate)

    for name, fn, what in (("sweep", cmd_sweep, "run an experiment spec and write CSV"),
                           ("ttl-sweep", cmd_ttl_sweep, "MCFR-Steiner delivery per TTL value, as CSV")):
        w = sub.add_parser(name, help=what)
        w.add_argument("spec", help="key=value experiment spec")
        w.add_argument("out", help="CSV output path")
        w.add_argument("--seed", type=int, help="override master_seed")
        w.add_argument("--runs", type=int, help="override runs_per_point")
        if name == "ttl-sweep":
            w.add_argument("--ttl-values", dest="ttl_values")
        w.set_defaults(func=fn)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"georoute: error: {e}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as e:
        print(f"georoute: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
