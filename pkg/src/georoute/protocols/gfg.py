"""Greedy forwarding with perimeter (face) recovery toward a geometric target.

Greedy hops use the full unit-disk graph; recovery traverses faces of the
planar subgraph with the left-hand rule, changing face whenever an edge
crosses the segment from the last face-change point to the target closer to
the target, and leaves recovery at the first node strictly closer to the
target than where recovery began.
"""

from __future__ import annotations

import math

from ..geometry import Point, dist, segment_intersection_point
from ..netgraph import Graph
from .messages import Kind, Recovery, RoutingMessage

FACE_CHANGE_EPS = 1e-9


def greedy_next(g: Graph, n: int, target: Point) -> int | None:
    """Neighbor strictly closer to target than n, closest first; None at a local minimum."""
    P = g.nodes
    best, best_d = None, dist(P[n], target)
    for v in g.adjacency[n]:
        d = dist(P[v], target)
        if d < best_d or (d == best_d and best is not None and v < best):
            best, best_d = v, d
    return best


def first_ccw_from(g: Graph, n: int, target: Point) -> int:
    """First neighbor met rotating counterclockwise from the ray n -> target."""
    c = g.nodes[n]
    ref = math.atan2(target[1] - c[1], target[0] - c[0])
    best, best_a = None, None
    for v in g.adjacency[n]:
        p = g.nodes[v]
        a = (math.atan2(p[1] - c[1], p[0] - c[0]) - ref) % (2 * math.pi)
        if best_a is None or a < best_a:
            best, best_a = v, a
    return best


def _face_change(planar_g: Graph, n: int, cand: int, rec: Recovery, target: Point):
    P = planar_g.nodes
    for _ in range(planar_g.degree(n)):
        x = segment_intersection_point((P[n], P[cand]), (rec.lf, target))
        if x is None or dist(x, target) >= dist(rec.lf, target) - FACE_CHANGE_EPS:
            break
        rec = rec._replace(lf=x)
        cand = planar_g.next_left(n, cand)
    return cand, rec


def gfg_next_hop(g: Graph, planar_g: Graph, n: int, sender: int | None, target: Point,
                 rec: Recovery | None) -> tuple[int | None, Recovery | None]:
    """Next hop from n toward target, and the recovery state to carry (None = greedy)."""
    here = g.nodes[n]
    if rec is not None and dist(here, target) < rec.entry_dist:
        rec = None
    if rec is None:
        nxt = greedy_next(g, n, target)
        if nxt is not None:
            return nxt, None
        if planar_g.degree(n) == 0:
            return None, None
        d = dist(here, target)
        rec = Recovery(here, d, here)
        cand = first_ccw_from(planar_g, n, target)
    else:
        if sender is None or not planar_g.has_edge(n, sender):
            return None, None
        cand = planar_g.next_left(n, sender)
    return _face_change(planar_g, n, cand, rec, target)


def gfg_unicast_step(g: Graph, planar_g: Graph, n: int, msg: RoutingMessage) -> RoutingMessage | None:
    """Forward a single-target sequential message one hop; None when it cannot move."""
    target = msg.route.point if msg.route is not None else msg.targets[0]
    sender = msg.sender if msg.kind is Kind.RECOVERY else None
    nxt, rec = gfg_next_hop(g, planar_g, n, sender, target, msg.recovery)
    if nxt is None:
        return None
    kind = Kind.GREEDY if rec is None else Kind.RECOVERY
    return msg.hop(kind, nxt, recovery=rec)
