"""Planar geometry primitives used by the graph, tree and routing code.

All predicates share one collinearity band: a triangle whose signed area is
smaller than ``EPS_AREA`` (square meters) counts as degenerate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

EPS_AREA = 1e-9


class Point(NamedTuple):
    x: float
    y: float


class Segment(NamedTuple):
    a: Point
    b: Point


class Orientation(IntEnum):
    CLOCKWISE = -1
    COLLINEAR = 0
    COUNTERCLOCKWISE = 1


def dist(p: Point, q: Point) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def signed_area(p: Point, q: Point, r: Point) -> float:
    """Signed area of triangle pqr, positive when counterclockwise."""
    return 0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))


def orientation(p: Point, q: Point, r: Point) -> Orientation:
    a = signed_area(p, q, r)
    if a > EPS_AREA:
        return Orientation.COUNTERCLOCKWISE
    if a < -EPS_AREA:
        return Orientation.CLOCKWISE
    return Orientation.COLLINEAR


def _on_segment(p: Point, q: Point, r: Point) -> bool:
    # r is known collinear with pq; check the bounding box
    return (min(p[0], q[0]) - 1e-12 <= r[0] <= max(p[0], q[0]) + 1e-12
            and min(p[1], q[1]) - 1e-12 <= r[1] <= max(p[1], q[1]) + 1e-12)


def segments_intersect(s1: Sequence[Point], s2: Sequence[Point]) -> bool:
    """True iff the closed segments share a point (touching and overlap count)."""
    p1, q1 = s1
    p2, q2 = s2
    # cheap bounding-box rejection
    if (max(p1[0], q1[0]) < min(p2[0], q2[0]) or max(p2[0], q2[0]) < min(p1[0], q1[0])
            or max(p1[1], q1[1]) < min(p2[1], q2[1]) or max(p2[1], q2[1]) < min(p1[1], q1[1])):
        return False
    o1 = orientation(p1, q1, p2)
    o2 = orientation(p1, q1, q2)
    o3 = orientation(p2, q2, p1)
    o4 = orientation(p2, q2, q1)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    if o1 == 0 and _on_segment(p1, q1, p2):
        return True
    if o2 == 0 and _on_segment(p1, q1, q2):
        return True
    if o3 == 0 and _on_segment(p2, q2, p1):
        return True
    if o4 == 0 and _on_segment(p2, q2, q1):
        return True
    return False


def segment_intersection_point(s1: Sequence[Point], s2: Sequence[Point]) -> Point | None:
    """Crossing point of two segments, or None when parallel or disjoint.

    Collinear overlaps return None; callers that care about "lies on" should
    use :func:`segments_intersect`.
    """
    (x1, y1), (x2, y2) = s1
    (x3, y3), (x4, y4) = s2
    den = (x1 - x2) * (y3 - y4) - (y1 - y2) * (x3 - x4)
    if abs(den) < 1e-15:
        return None
    t = ((x1 - x3) * (y3 - y4) - (y1 - y3) * (x3 - x4)) / den
    u = ((x1 - x3) * (y1 - y2) - (y1 - y3) * (x1 - x2)) / den
    if -1e-12 <= t <= 1 + 1e-12 and -1e-12 <= u <= 1 + 1e-12:
        return Point(x1 + t * (x2 - x1), y1 + t * (y2 - y1))
    return None


def clockwise_bearing(center: Point, p: Point) -> float:
    """Angle of p seen from center, measured clockwise from due east, in [0, 2*pi)."""
    b = -math.atan2(p[1] - center[1], p[0] - center[0])
    if b < 0:
        b += 2 * math.pi
    if b >= 2 * math.pi:
        b = 0.0
    return b


def angular_order(center: Point, neighbors: Iterable[Point]) -> list[Point]:
    """Order neighbors clockwise starting at due east; ties by distance."""
    pts = list(neighbors)
    for p in pts:
        if p[0] == center[0] and p[1] == center[1]:
            raise ValueError(f"neighbor {p} coincides with center {center}")
    return sorted(pts, key=lambda p: (clockwise_bearing(center, p), dist(center, p)))


def next_right(center: Point, ordered: Sequence, v) -> object:
    """Clockwise successor of v in a clockwise-ordered neighbor list."""
    i = ordered.index(v)
    return ordered[(i + 1) % len(ordered)]


def next_left(center: Point, ordered: Sequence, v) -> object:
    """Counterclockwise successor (clockwise predecessor) of v."""
    i = ordered.index(v)
    return ordered[(i - 1) % len(ordered)]


@dataclass(frozen=True)
class Polygon:
    """Counterclockwise vertex cycle. Fewer than three vertices means degenerate."""

    vertices: tuple[Point, ...]

    @property
    def area(self) -> float:
        return polygon_area(self)

    @property
    def is_degenerate(self) -> bool:
        return len(self.vertices) < 3 or self.area <= EPS_AREA

    def contains(self, p: Point) -> bool:
        """Inside-or-on test; valid for convex polygons only."""
        vs = self.vertices
        if len(vs) == 1:
            return dist(vs[0], p) <= 1e-9
        if len(vs) == 2:
            return orientation(vs[0], vs[1], p) == 0 and _on_segment(vs[0], vs[1], p)
        for i in range(len(vs)):
            if orientation(vs[i], vs[(i + 1) % len(vs)], p) < 0:
                return False
        return True


def polygon_area(poly: Polygon | Sequence[Point]) -> float:
    vs = poly.vertices if isinstance(poly, Polygon) else poly
    n = len(vs)
    if n < 3:
        return 0.0
    s = 0.0
    for i in range(n):
        x1, y1 = vs[i]
        x2, y2 = vs[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return abs(s) / 2.0


def _exact_turn(p: Point, q: Point, r: Point) -> int:
    """Sign of the cross product (q-p) x (r-p), exact for any finite floats."""
    a = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    scale = max(abs(q[0] - p[0]), abs(q[1] - p[1]), abs(r[0] - p[0]), abs(r[1] - p[1]))
    if abs(a) > 1e-12 * scale * scale:
        return 1 if a > 0 else -1
    F = Fraction
    e = (F(q[0]) - F(p[0])) * (F(r[1]) - F(p[1])) - (F(q[1]) - F(p[1])) * (F(r[0]) - F(p[0]))
    return (e > 0) - (e < 0)


def convex_hull(points: Iterable[Point]) -> Polygon:
    """Andrew's monotone chain with exact turns. Collinear boundary points are dropped."""
    pts = sorted(set(Point(*p) for p in points))
    if not pts:
        raise ValueError("convex hull of an empty point set")
    if len(pts) <= 2:
        return Polygon(tuple(pts))

    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and _exact_turn(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _exact_turn(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        # all collinear: keep the two extremes
        return Polygon((pts[0], pts[-1]))
    return Polygon(tuple(hull))
