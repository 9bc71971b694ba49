"""Experiment harness: random instances, sweeps, metric aggregation and CSV output."""

from __future__ import annotations

import csv
import logging
import math
import statistics
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, Sequence

from .geometry import Point, dist
from .netgraph import (Graph, enumerate_faces, gabriel_subgraph, make_rng, node_count,
                       random_placement, reachable_set, unit_disk_graph)
from .protocols import ALGORITHMS, make_protocol
from .simengine import (SimConfig, Transcript, delivery_ratio_of, latency_of,
                        message_cost_of, run)
from .trees import Tree, steiner_tree, tree_metrics

log = logging.getLogger(__name__)

CSV_COLUMNS = ("point_id", "algorithm", "density", "loss", "ttl", "run", "n_nodes", "n_edges",
               "n_targets", "reachable_targets", "delivery_ratio", "latency_norm",
               "msg_cost_norm", "tree_len", "tree_diam", "hull_area", "quiescent")


@dataclass
class ExperimentSpec:
    densities: tuple[float, ...] = (7.0,)
    losses: tuple[float, ...] = (0.0,)
    algorithms: tuple[str, ...] = ALGORITHMS
    field_width: float = 1000.0
    field_height: float = 1000.0
    unit_radius: float = 100.0
    target_fraction: float = 0.05
    runs_per_point: int = 1000
    ttl: int | None = 55
    master_seed: int = 0
    flush_batches: bool = False
    batched_counting: bool = True
    ttl_values: tuple[int | None, ...] = ()

    def __post_init__(self):
        if not 0.0 < self.target_fraction < 1.0:
            raise ValueError("target_fraction must lie in (0, 1)")
        if self.runs_per_point < 1:
            raise ValueError("runs_per_point must be at least 1")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}")
        for p in self.losses:
            if not 0.0 <= p < 1.0:
                raise ValueError(f"loss {p} outside [0, 1)")
        for d in self.densities:
            if d <= 0:
                raise ValueError(f"density {d} must be positive")


@dataclass
class Instance:
    g: Graph
    planar: Graph
    source: int
    targets: tuple[int, ...]
    reachable_targets: int
    tree: Tree


@dataclass
class RunRow:
    point_id: str
    algorithm: str
    density: float
    loss: float
    ttl: int | None
    run: int
    n_nodes: int
    n_edges: int
    n_targets: int
    reachable_targets: int
    delivery_ratio: float
    latency_norm: float | None
    msg_cost_norm: float | None
    tree_len: float
    tree_diam: float
    hull_area: float
    quiescent: bool


@dataclass
class ExperimentRecord:
    point_id: str
    algorithm: str
    density: float
    loss: float
    ttl: int | None
    rows: list[RunRow] = field(default_factory=list)

    def aggregate(self, column: str) -> tuple[float | None, float | None]:
        """Mean and population std of a column over runs where it is defined."""
        vals = [float(getattr(r, column)) for r in self.rows if getattr(r, column) is not None]
        if not vals:
            return None, None
        vals.sort()  # order-independent floating sums
        return math.fsum(vals) / len(vals), statistics.pstdev(vals) if len(vals) > 1 else 0.0

    @property
    def mean_delivery_ratio(self) -> float:
        return self.aggregate("delivery_ratio")[0]


def point_id(algorithm: str, density: float, loss: float, ttl: int | None) -> str:
    return f"{algorithm}@d{density:g}/l{loss:g}/t{'inf' if ttl is None else ttl}"


def make_instance(spec: ExperimentSpec, density: float, run_index: int) -> Instance:
    """Fresh placement, unit-disk graph, Gabriel subgraph, source and targets."""
    rng = make_rng(f"{spec.master_seed}:instance:{density!r}:{run_index}")
    pts = random_placement(spec.field_width, spec.field_height, density, rng, spec.unit_radius)
    g = unit_disk_graph(pts, spec.unit_radius)
    planar = gabriel_subgraph(g)
    n = len(g)
    source = rng.randrange(n)
    m = min(n - 1, math.ceil(spec.target_fraction * n))
    targets = tuple(rng.sample([i for i in range(n) if i != source], m))
    reach = reachable_set(g, source)
    tree = steiner_tree([g.nodes[source]] + [g.nodes[t] for t in targets])
    return Instance(g, planar, source, targets, sum(t in reach for t in targets), tree)


def simulate_instance(inst: Instance, algorithm: str, cfg: SimConfig) -> Transcript:
    proto = make_protocol(algorithm, inst.g, inst.planar, inst.source, inst.targets)
    return run(inst.g, inst.planar, proto, cfg)


def run_experiment(spec: ExperimentSpec) -> list[ExperimentRecord]:
    records: dict[tuple, ExperimentRecord] = {}
    order = []
    for density in spec.densities:
        for loss in spec.losses:
            for alg in spec.algorithms:
                key = (density, loss, alg)
                records[key] = ExperimentRecord(point_id(alg, density, loss, spec.ttl), alg,
                                                density, loss, spec.ttl)
                order.append(key)
        for r in range(spec.runs_per_point):
            inst = make_instance(spec, density, r)
            tm = tree_metrics(inst.tree)
            for loss in spec.losses:
                for alg in spec.algorithms:
                    cfg = SimConfig(loss, spec.ttl,
                                    rng_seed=f"{spec.master_seed}:channel:{density!r}:{loss!r}:{alg}:{spec.ttl}:{r}",
                                    batched_transmission_counting=spec.batched_counting,
                                    flush_batches=spec.flush_batches)
                    tr = simulate_instance(inst, alg, cfg)
                    rec = records[(density, loss, alg)]
                    rec.rows.append(RunRow(
                        rec.point_id, alg, density, loss, spec.ttl, r, len(inst.g),
                        inst.planar.n_edges, len(inst.targets), inst.reachable_targets,
                        delivery_ratio_of(tr), latency_of(tr, None, inst.g), message_cost_of(tr),
                        tm.total_length, tm.diameter, tm.hull_area, tr.quiescent))
            log.debug("density %s run %d done", density, r)
    return [records[k] for k in order]


def ttl_sweep(spec: ExperimentSpec, ttl_values: Sequence[int | None]) -> list[ExperimentRecord]:
    """MCFR-Steiner at the spec's first loss level, one record per (TTL, density)."""
    out = []
    for ttl in ttl_values:
        sub = replace(spec, ttl=ttl, algorithms=("mcfr-steiner",), losses=(spec.losses[0],))
        out.extend(run_experiment(sub))
    return out


def face_smoothness_stats(g: Graph) -> dict[str, float]:
    """Perimeter^2 / area over internal faces; empty when there are none."""
    ratios = []
    for f in enumerate_faces(g):
        if f.is_external:
            continue
        a = abs(f.signed_area(g))
        if a <= 1e-12:
            continue
        ratios.append(f.perimeter(g) ** 2 / a)
    if not ratios:
        return {}
    return {"faces": len(ratios), "max_ratio": max(ratios),
            "mean_ratio": math.fsum(ratios) / len(ratios)}


# -- CSV ---------------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def emit_csv(records: Iterable[ExperimentRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for rec in records:
            for row in rec.rows:
                w.writerow([_fmt(getattr(row, c)) for c in CSV_COLUMNS])
            for stat in ("mean", "std"):
                line = {"point_id": rec.point_id, "algorithm": rec.algorithm,
                        "density": rec.density, "loss": rec.loss, "ttl": rec.ttl, "run": stat}
                for c in CSV_COLUMNS:
                    if c not in line:
                        mean, std = rec.aggregate(c)
                        line[c] = mean if stat == "mean" else std
                w.writerow([_fmt(line[c]) for c in CSV_COLUMNS])


def read_csv(path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# -- spec files --------------------------------------------------------------

def parse_kv(text: str) -> dict[str, str]:
    """Plain key=value lines; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def _ttl(v: str) -> int | None:
    return None if v.lower() in ("inf", "none", "unlimited") else int(v)


def _bool(v: str) -> bool:
    return v.lower() in ("1", "true", "yes", "on")


def _items(v: str) -> list[str]:
    return [x.strip() for x in v.split(",") if x.strip()]


_PARSERS = {
    "densities": lambda v: tuple(float(x) for x in _items(v)),
    "losses": lambda v: tuple(float(x) for x in _items(v)),
    "algorithms": lambda v: tuple(_items(v)),
    "field_width": float, "field_height": float, "unit_radius": float,
    "target_fraction": float, "runs_per_point": int, "ttl": _ttl, "master_seed": int,
    "flush_batches": _bool, "batched_counting": _bool,
    "ttl_values": lambda v: tuple(_ttl(x) for x in _items(v)),
}


def spec_from_mapping(kv: dict[str, str], **overrides) -> ExperimentSpec:
    args = {}
    for k, v in kv.items():
        if k not in _PARSERS:
            raise ValueError(f"unknown spec key {k!r}")
        args[k] = _PARSERS[k](v)
    args.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentSpec(**args)


def load_spec(path, **overrides) -> ExperimentSpec:
    return spec_from_mapping(parse_kv(Path(path).read_text()), **overrides)


def spec_to_text(spec: ExperimentSpec) -> str:
    lines = []
    for f in fields(spec):
        v = getattr(spec, f.name)
        if isinstance(v, tuple):
            v = ",".join("inf" if x is None else _fmt(x) for x in v)
        elif v is None:
            v = "inf"
        else:
            v = _fmt(v)
        lines.append(f"{f.name}={v}")
    return "\n".join(lines) + "\n"


# -- network-size independence of latency ------------------------------------

@dataclass
class LocalityResult:
    n_small: int
    n_large: int
    mcfr_mean_slots: tuple[float, float]
    gfg_worst_slots: tuple[int, int]
    instances: int

    @property
    def mcfr_relative_change(self) -> float:
        a, b = self.mcfr_mean_slots
        return abs(b - a) / a


def _nested_instances(n_small: int, n_large: int, density: float, unit: float, seed):
    """Large square field whose central square holds the small instance."""
    side = lambda n: math.sqrt(n * math.pi * unit * unit / density)
    s_small, s_large = side(n_small), side(n_large)
    rng = make_rng(seed)
    pts_large = random_placement(s_large, s_large, density, rng, unit)
    lo = (s_large - s_small) / 2
    hi = lo + s_small
    pts_small = [p for p in pts_large if lo <= p.x < hi and lo <= p.y < hi]
    center = Point(s_large / 2, s_large / 2)
    return pts_small, pts_large, center, rng


def locality_study(n_small: int = 300, n_large: int = 1200, density: float = 7.0,
                   disk_radius: float = 150.0, n_targets: int = 4, instances: int = 30,
                   unit: float = 100.0, seed: int = 0) -> LocalityResult:
    """Same source and targets near the field center, small vs large field.

    Reports MCFR's mean (over instances) slot of its last first-delivery and
    the worst such slot for per-target GFG unicast.
    """
    sums = [0.0, 0.0]
    worst = [0, 0]
    sizes = [0, 0]
    done = 0
    k = 0
    while done < instances:
        k += 1
        small, large, center, rng = _nested_instances(n_small, n_large, density, unit,
                                                      f"{seed}:locality:{k}")
        gs = unit_disk_graph(small, unit)
        near = sorted((i for i, p in enumerate(small) if dist(p, center) <= disk_radius),
                      key=lambda i: dist(small[i], center))
        if len(near) < n_targets + 1:
            continue
        src = near[0]
        reach = reachable_set(gs, src)
        pool = [i for i in near[1:] if i in reach]
        if len(pool) < n_targets:
            continue
        tgt_pts = [small[i] for i in rng.sample(pool, n_targets)]
        src_pt = small[src]
        for j, pts in enumerate((small, large)):
            g = gs if j == 0 else unit_disk_graph(pts, unit)
            pg = gabriel_subgraph(g)
            s = g.node_at(src_pt)
            ts = [g.node_at(p) for p in tgt_pts]
            sizes[j] = len(g)
            tr = run(g, pg, make_protocol("mcfr-steiner", g, pg, s, ts), SimConfig(0.0, None))
            sums[j] += max(tr.deliveries.first_slot[t] for t in ts)
            tr = run(g, pg, make_protocol("gfg-unicast", g, pg, s, ts), SimConfig(0.0, None))
            worst[j] = max(worst[j], max(tr.deliveries.first_slot.get(t, tr.slots) for t in ts))
        done += 1
    return LocalityResult(sizes[0], sizes[1], (sums[0] / done, sums[1] / done),
                          (worst[0], worst[1]), done)
