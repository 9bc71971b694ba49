"""Wireless network graphs: placement, unit-disk links, Gabriel planarization, faces."""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .geometry import Point, clockwise_bearing, dist

DISCONNECTED = None


def make_rng(seed) -> random.Random:
    if isinstance(seed, random.Random):
        return seed
    return random.Random(seed)


@dataclass(eq=False)
class Graph:
    """Embedded undirected graph with clockwise-ordered adjacency lists.

    Treat instances as immutable once built.
    """

    nodes: tuple[Point, ...]
    adjacency: tuple[tuple[int, ...], ...]
    unit_radius: float
    _pos: list[dict[int, int]] = field(init=False, repr=False)

    def __post_init__(self):
        self.nodes = tuple(Point(*p) for p in self.nodes)
        self.adjacency = tuple(tuple(a) for a in self.adjacency)
        self._pos = [{v: i for i, v in enumerate(a)} for a in self.adjacency]

    @classmethod
    def from_edges(cls, nodes: Sequence[Point], edges: Iterable[tuple[int, int]],
                   unit_radius: float) -> "Graph":
        nodes = [Point(*p) for p in nodes]
        adj: list[set[int]] = [set() for _ in nodes]
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            adj[u].add(v)
            adj[v].add(u)
        ordered = []
        for u, nbrs in enumerate(adj):
            c = nodes[u]
            ordered.append(sorted(nbrs, key=lambda v: (clockwise_bearing(c, nodes[v]),
                                                       dist(c, nodes[v]), v)))
        return cls(tuple(nodes), tuple(tuple(a) for a in ordered), unit_radius)

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, a in enumerate(self.adjacency) for v in a if u < v]

    @property
    def n_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._pos[u]

    def next_right(self, u: int, v: int) -> int:
        """Neighbor of u that follows v clockwise."""
        a = self.adjacency[u]
        return a[(self._pos[u][v] + 1) % len(a)]

    def next_left(self, u: int, v: int) -> int:
        """Neighbor of u that follows v counterclockwise."""
        a = self.adjacency[u]
        return a[(self._pos[u][v] - 1) % len(a)]

    def angles(self, u: int) -> list[tuple[int, int]]:
        """Consecutive-neighbor angles at u as (c, d) pairs, d next-left after c.

        Degree 1 yields the single degenerate angle (v, v).
        """
        return [(c, self.next_left(u, c)) for c in self.adjacency[u]]

    def node_at(self, p: Point) -> int | None:
        if not hasattr(self, "_index"):
            self._index = {q: i for i, q in enumerate(self.nodes)}
        return self._index.get(Point(*p))


@dataclass(frozen=True)
class Face:
    """A next-left traversal cycle of directed edges."""

    boundary: tuple[tuple[int, int], ...]
    is_external: bool = False

    @property
    def nodes(self) -> set[int]:
        return {u for u, _ in self.boundary}

    def vertex_cycle(self) -> list[int]:
        return [u for u, _ in self.boundary]

    def signed_area(self, g: Graph) -> float:
        s = 0.0
        for u, v in self.boundary:
            (x1, y1), (x2, y2) = g.nodes[u], g.nodes[v]
            s += x1 * y2 - x2 * y1
        return s / 2.0

    def perimeter(self, g: Graph) -> float:
        return sum(dist(g.nodes[u], g.nodes[v]) for u, v in self.boundary)


def node_count(field_width: float, field_height: float, density: float,
               unit_radius: float = 100.0) -> int:
    if field_width <= 0 or field_height <= 0:
        raise ValueError("field must have positive area")
    if density <= 0:
        raise ValueError("density must be positive")
    return round(density * field_width * field_height / (math.pi * unit_radius ** 2))


def random_placement(field_width: float, field_height: float, density: float,
                     rng_seed=0, unit_radius: float = 100.0) -> list[Point]:
    """Uniform placement with the node count implied by the average disk degree."""
    n = node_count(field_width, field_height, density, unit_radius)
    if n <= 0:
        raise ValueError(f"density {density} yields no nodes on this field")
    rng = make_rng(rng_seed)
    seen: set[Point] = set()
    pts: list[Point] = []
    while len(pts) < n:
        p = Point(rng.uniform(0.0, field_width), rng.uniform(0.0, field_height))
        if p in seen:
            continue
        seen.add(p)
        pts.append(p)
    return pts


def unit_disk_graph(points: Sequence[Point], unit_radius: float) -> Graph:
    points = [Point(*p) for p in points]
    if len(set(points)) != len(points):
        raise ValueError("duplicate node coordinates")
    r2 = unit_radius * unit_radius
    cell: dict[tuple[int, int], list[int]] = {}
    for i, (x, y) in enumerate(points):
        cell.setdefault((math.floor(x / unit_radius), math.floor(y / unit_radius)), []).append(i)
    edges = []
    for i, (x, y) in enumerate(points):
        cx, cy = math.floor(x / unit_radius), math.floor(y / unit_radius)
        for gx in (cx - 1, cx, cx + 1):
            for gy in (cy - 1, cy, cy + 1):
                for j in cell.get((gx, gy), ()):
                    if j > i:
                        dx, dy = points[j][0] - x, points[j][1] - y
                        if dx * dx + dy * dy <= r2:
                            edges.append((i, j))
    return Graph.from_edges(points, edges, unit_radius)


def in_diametral_disk(u: Point, v: Point, w: Point) -> bool:
    """w strictly inside the disk with diameter uv (Thales: angle uwv obtuse)."""
    return (u[0] - w[0]) * (v[0] - w[0]) + (u[1] - w[1]) * (v[1] - w[1]) < 0


def gabriel_subgraph(g: Graph) -> Graph:
    """Keep edge uv iff no other node lies strictly inside its diametral disk.

    Any witness lies within |uv| of u, so u's unit-disk neighbors suffice.
    """
    keep = []
    P = g.nodes
    for u, v in g.edges:
        pu, pv = P[u], P[v]
        if not any(w != v and in_diametral_disk(pu, pv, P[w]) for w in g.adjacency[u]):
            keep.append((u, v))
    return Graph.from_edges(P, keep, g.unit_radius)


def components(g: Graph) -> list[list[int]]:
    seen = [False] * len(g)
    out = []
    for s in range(len(g)):
        if seen[s]:
            continue
        comp = sorted(reachable_set(g, s))
        for u in comp:
            seen[u] = True
        out.append(comp)
    return out


def enumerate_faces(g: Graph) -> list[Face]:
    """Partition directed edges into next-left cycles.

    Internal faces come out clockwise (negative signed area). In each
    connected component the cycle with the largest signed area is its outer
    boundary and is flagged external; isolated nodes have no face.
    """
    seen: set[tuple[int, int]] = set()
    cycles: list[tuple[tuple[int, int], ...]] = []
    for u0 in range(len(g)):
        for v0 in g.adjacency[u0]:
            if (u0, v0) in seen:
                continue
            cyc = []
            u, v = u0, v0
            while (u, v) not in seen:
                seen.add((u, v))
                cyc.append((u, v))
                u, v = v, g.next_left(v, u)
            cycles.append(tuple(cyc))

    comp_of = {}
    for ci, comp in enumerate(components(g)):
        for u in comp:
            comp_of[u] = ci
    best: dict[int, tuple[float, int]] = {}
    for k, cyc in enumerate(cycles):
        a = Face(cyc).signed_area(g)
        c = comp_of[cyc[0][0]]
        if c not in best or a > best[c][0]:
            best[c] = (a, k)
    external = {k for _, k in best.values()}
    return [Face(cyc, k in external) for k, cyc in enumerate(cycles)]


def shortest_path_hops(g: Graph, s: int, t: int) -> int | None:
    """BFS hop count from s to t; None when t is unreachable."""
    if s == t:
        return 0
    depth = {s: 0}
    q = deque([s])
    while q:
        u = q.popleft()
        for v in g.adjacency[u]:
            if v not in depth:
                depth[v] = depth[u] + 1
                if v == t:
                    return depth[v]
                q.append(v)
    return DISCONNECTED


def hop_distances(g: Graph, s: int) -> dict[int, int]:
    depth = {s: 0}
    q = deque([s])
    while q:
        u = q.popleft()
        for v in g.adjacency[u]:
            if v not in depth:
                depth[v] = depth[u] + 1
                q.append(v)
    return depth


def reachable_set(g: Graph, s: int) -> set[int]:
    return set(hop_distances(g, s))


# -- plain-text dump -------------------------------------------------------

def dump_graph(g: Graph, path, tree=None) -> None:
    Path(path).write_text(dumps_graph(g, tree))


def dumps_graph(g: Graph, tree=None) -> str:
    lines = [f"nodes {len(g)} radius {float(g.unit_radius)!r}"]
    lines += [f"{i} {p.x!r} {p.y!r}" for i, p in enumerate(g.nodes)]
    lines += [f"edge {u} {v}" for u, v in g.edges]
    if tree is not None:
        lines.append(f"tree terminals {len(tree.terminals)} virtual {len(tree.virtual_nodes)}")
        lines += [f"tnode {i} {p.x!r} {p.y!r}" for i, p in enumerate(tree.nodes)]
        lines += [f"tedge {i} {j}" for i, j in tree.edges]
    return "\n".join(lines) + "\n"


def load_graph(path):
    """Parse a dump; returns (graph, tree-or-None)."""
    return loads_graph(Path(path).read_text())


def loads_graph(text: str):
    from .trees import Tree

    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0][0] != "nodes" or len(lines[0]) != 4 or lines[0][2] != "radius":
        raise ValueError("graph dump must start with 'nodes <n> radius <r>'")
    try:
        n = int(lines[0][1])
        radius = float(lines[0][3])
        nodes: list[Point | None] = [None] * n
        edges = []
        tree_hdr = None
        tnodes: dict[int, Point] = {}
        tedges = []
        for parts in lines[1:]:
            tag = parts[0]
            if tag == "edge":
                edges.append((int(parts[1]), int(parts[2])))
            elif tag == "tree":
                tree_hdr = (int(parts[2]), int(parts[4]))
            elif tag == "tnode":
                tnodes[int(parts[1])] = Point(float(parts[2]), float(parts[3]))
            elif tag == "tedge":
                tedges.append((int(parts[1]), int(parts[2])))
            else:
                nodes[int(tag)] = Point(float(parts[1]), float(parts[2]))
    except (IndexError, ValueError) as exc:
        raise ValueError(f"malformed graph dump: {exc}") from exc
    if any(p is None for p in nodes):
        raise ValueError("graph dump is missing node lines")
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) references an unknown node")
    g = Graph.from_edges(nodes, edges, radius)
    tree = None
    if tree_hdr is not None:
        m, k = tree_hdr
        pts = [tnodes[i] for i in range(m + k)]
        tree = Tree(tuple(pts[:m]), tuple(pts[m:]), tuple(tuple(e) for e in tedges))
    return g, tree
