"""Euclidean spanning and Steiner trees over the multicast terminals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

from .geometry import Point, Polygon, convex_hull, dist, segments_intersect

TWO_THIRDS_PI = 2.0 * math.pi / 3.0
IMPROVE_TOL = 1e-9
FERMAT_TOL = 1e-9
FERMAT_MAX_ITER = 10_000


@dataclass(frozen=True)
class Tree:
    """Tree over terminals (source first) plus virtual Steiner nodes.

    ``edges`` index into ``nodes`` = terminals + virtual_nodes.
    """

    terminals: tuple[Point, ...]
    virtual_nodes: tuple[Point, ...]
    edges: tuple[tuple[int, int], ...]

    @property
    def nodes(self) -> tuple[Point, ...]:
        return self.terminals + self.virtual_nodes

    @property
    def source(self) -> Point:
        return self.terminals[0]

    @property
    def targets(self) -> tuple[Point, ...]:
        return self.terminals[1:]

    @cached_property
    def segments(self) -> tuple[tuple[Point, Point], ...]:
        nodes = self.nodes
        return tuple((nodes[i], nodes[j]) for i, j in self.edges)

    @cached_property
    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.nodes]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return adj

    @cached_property
    def target_set(self) -> frozenset[Point]:
        return frozenset(self.terminals[1:])

    @cached_property
    def valid(self) -> bool:
        return self.is_valid()

    @property
    def total_length(self) -> float:
        return sum(dist(a, b) for a, b in self.segments)

    def is_valid(self) -> bool:
        n = len(self.nodes)
        if len(self.edges) != n - 1 or len(self.terminals) < 1:
            return False
        if any(not (0 <= i < n and 0 <= j < n) or i == j for i, j in self.edges):
            return False
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in self.adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == n


@dataclass(frozen=True)
class TreeMetrics:
    total_length: float
    diameter: float
    hull: Polygon
    hull_area: float


@dataclass(frozen=True)
class Branch:
    """Rooted subtree carried by sequential multicast messages.

    ``point`` is the waypoint to reach next; ``is_target`` marks real targets.
    """

    point: Point
    is_target: bool
    children: tuple["Branch", ...] = ()

    def targets(self) -> Iterator[Point]:
        if self.is_target:
            yield self.point
        for c in self.children:
            yield from c.targets()


def _check_terminals(terminals: Sequence[Point]) -> list[Point]:
    pts = [Point(*p) for p in terminals]
    if len(pts) < 2:
        raise ValueError("a tree needs at least two terminals")
    if len(set(pts)) != len(pts):
        raise ValueError("terminals must be distinct")
    return pts


def euclidean_mst(terminals: Sequence[Point]) -> Tree:
    """Kruskal over the complete graph; ties broken by the lexicographic point pair."""
    pts = _check_terminals(terminals)
    n = len(pts)
    cand = []
    for i in range(n):
        for j in range(i + 1, n):
            a, b = (pts[i], pts[j]) if pts[i] <= pts[j] else (pts[j], pts[i])
            cand.append((dist(pts[i], pts[j]), a, b, i, j))
    cand.sort()
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = []
    for _, _, _, i, j in cand:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            edges.append((i, j))
            if len(edges) == n - 1:
                break
    return Tree(tuple(pts), (), tuple(edges))


def _angle(u: Point, v: Point, w: Point) -> float:
    ax, ay = v[0] - u[0], v[1] - u[1]
    bx, by = w[0] - u[0], w[1] - u[1]
    return abs(math.atan2(ax * by - ay * bx, ax * bx + ay * by))


def fermat_point(a: Point, b: Point, c: Point) -> Point:
    """Point minimizing the summed distance to a, b, c (Weiszfeld iteration).

    When one angle of the triangle is at least 120 degrees that vertex is the
    answer and is returned as-is.
    """
    for p, q, r in ((a, b, c), (b, c, a), (c, a, b)):
        if _angle(p, q, r) >= TWO_THIRDS_PI:
            return Point(*p)
    x = (a[0] + b[0] + c[0]) / 3.0
    y = (a[1] + b[1] + c[1]) / 3.0
    for _ in range(FERMAT_MAX_ITER):
        sx = sy = sw = 0.0
        for px, py in (a, b, c):
            d = math.hypot(px - x, py - y)
            if d < 1e-15:
                return Point(px, py)
            sx += px / d
            sy += py / d
            sw += 1.0 / d
        nx, ny = sx / sw, sy / sw
        if math.hypot(nx - x, ny - y) < FERMAT_TOL:
            return Point(nx, ny)
        x, y = nx, ny
    return Point(x, y)


def _relocate(pts: list[Point], adj: list[set[int]], m: int, sweeps: int = FERMAT_MAX_ITER) -> bool:
    """Gauss-Seidel Weiszfeld sweeps over the virtual nodes (indices >= m).

    Returns False if a virtual node collapses onto a neighbor.
    """
    for _ in range(sweeps):
        moved = 0.0
        for k in range(m, len(pts)):
            x, y = pts[k]
            sx = sy = sw = 0.0
            for j in adj[k]:
                px, py = pts[j]
                d = math.hypot(px - x, py - y)
                if d < 1e-9:
                    return False
                sx += px / d
                sy += py / d
                sw += 1.0 / d
            nx, ny = sx / sw, sy / sw
            moved = max(moved, abs(nx - x) + abs(ny - y))
            pts[k] = Point(nx, ny)
        if moved < FERMAT_TOL:
            return True
    return True


def _virtuals_ok(pts: list[Point], adj: list[set[int]], m: int, tol: float = 1e-6) -> bool:
    for k in range(m, len(pts)):
        nb = sorted(adj[k])
        if len(nb) != 3:
            return False
        for i in range(3):
            for j in range(i + 1, 3):
                if _angle(pts[k], pts[nb[i]], pts[nb[j]]) < TWO_THIRDS_PI - tol:
                    return False
    return True


def steiner_tree(terminals: Sequence[Point]) -> Tree:
    """MST improvement heuristic with Fermat-point insertion.

    Starting from the MST, repeatedly take the terminal u and two of its tree
    neighbors v, w meeting at less than 120 degrees whose replacement by a
    degree-3 virtual node gives the largest length reduction, insert it, and
    re-optimize every virtual node position. Insertions that would leave a
    virtual node degenerate are skipped. Stops when no insertion shortens the
    tree by more than IMPROVE_TOL.
    """
    mst = euclidean_mst(terminals)
    m = len(mst.terminals)
    if m == 2:
        return mst
    pts = list(mst.terminals)
    adj: list[set[int]] = [set() for _ in range(m)]
    for i, j in mst.edges:
        adj[i].add(j)
        adj[j].add(i)

    def length():
        return sum(dist(pts[i], pts[j]) for i in range(len(pts)) for j in adj[i] if i < j)

    rejected: set[tuple[int, int, int]] = set()
    while True:
        cands = []
        for u in range(m):
            nb = sorted(adj[u])
            for a in range(len(nb)):
                for b in range(a + 1, len(nb)):
                    v, w = nb[a], nb[b]
                    if (u, v, w) in rejected:
                        continue
                    pu, pv, pw = pts[u], pts[v], pts[w]
                    if _angle(pu, pv, pw) >= TWO_THIRDS_PI:
                        continue
                    x = fermat_point(pu, pv, pw)
                    gain = dist(pu, pv) + dist(pu, pw) - dist(x, pu) - dist(x, pv) - dist(x, pw)
                    if gain > IMPROVE_TOL:
                        cands.append((-gain, u, v, w, x))
        if not cands:
            break
        cands.sort()
        committed = False
        before = length()
        for _, u, v, w, x in cands:
            trial_pts = pts + [x]
            k = len(pts)
            trial_adj = [set(s) for s in adj] + [{u, v, w}]
            trial_adj[u] -= {v, w}
            trial_adj[v].discard(u)
            trial_adj[w].discard(u)
            trial_adj[u].add(k)
            trial_adj[v].add(k)
            trial_adj[w].add(k)
            ok = _relocate(trial_pts, trial_adj, m) and _virtuals_ok(trial_pts, trial_adj, m)
            if ok:
                saved_pts, saved_adj = pts, adj
                pts, adj = trial_pts, trial_adj
                if length() < before - IMPROVE_TOL:
                    committed = True
                    break
                pts, adj = saved_pts, saved_adj
            rejected.add((u, v, w))
        if not committed:
            break
        rejected.clear()

    edges = tuple((i, j) for i in range(len(pts)) for j in sorted(adj[i]) if i < j)
    return Tree(tuple(pts[:m]), tuple(pts[m:]), edges)


def tree_metrics(t: Tree) -> TreeMetrics:
    hull = convex_hull(t.nodes)
    return TreeMetrics(t.total_length, tree_diameter(t), hull, hull.area)


def _farthest(t: Tree, start: int) -> tuple[int, float]:
    best = (start, 0.0)
    stack = [(start, -1, 0.0)]
    nodes = t.nodes
    while stack:
        u, parent, d = stack.pop()
        if d > best[1]:
            best = (u, d)
        for v in t.adjacency[u]:
            if v != parent:
                stack.append((v, u, d + dist(nodes[u], nodes[v])))
    return best


def tree_diameter(t: Tree) -> float:
    """Longest weighted path, by two farthest-node sweeps."""
    if not t.edges:
        return 0.0
    far, _ = _farthest(t, 0)
    _, d = _farthest(t, far)
    return d


def segment_intersects_tree(a: Point, b: Point, t: Tree) -> bool:
    return any(segments_intersect((a, b), s) for s in t.segments)


def angle_intersects_tree(u: Point, v: Point, w: Point, t: Tree) -> bool:
    """Does either edge of angle vuw lie on or cross an edge of t?"""
    if segment_intersects_tree(u, v, t):
        return True
    return w != v and segment_intersects_tree(u, w, t)


def is_juncture(g, n: int, t: Tree) -> bool:
    """Some consecutive-neighbor angle at n intersects t."""
    p = g.nodes
    return any(angle_intersects_tree(p[n], p[c], p[d], t) for c, d in g.angles(n))


def rooted(t: Tree, root: int = 0) -> Branch:
    """Branch view of t hanging from node ``root``; terminals 1.. are targets."""
    m = len(t.terminals)
    nodes = t.nodes

    def build(u: int, parent: int) -> Branch:
        kids = tuple(build(v, u) for v in t.adjacency[u] if v != parent)
        return Branch(nodes[u], 1 <= u < m, kids)

    return build(root, -1)
