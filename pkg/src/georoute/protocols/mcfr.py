"""Concurrent multicast face routing.

A face message traverses one face of the planar graph with the left-hand
(``L``) or right-hand (``R``) rule. The source and every node reached through
an angle whose edges touch the multicast tree inject a pair of opposite
messages into each other tree-touching angle; a pair traversing the same face
in opposite directions cancels when the two meet. Nodes keep no state: all
bookkeeping is in the messages and the send queue.
"""

from __future__ import annotations

from typing import Sequence

from ..netgraph import Graph
from ..trees import Tree, segment_intersects_tree
from .messages import Actions, Kind, RoutingMessage, mate_of


class EdgeHits:
    """Memoized "edge uv lies on or crosses a tree edge" for one tree."""

    def __init__(self, g: Graph, tree: Tree):
        self.g = g
        self.tree = tree
        self._cache: dict[tuple[int, int], bool] = {}

    def __call__(self, u: int, v: int) -> bool:
        key = (u, v) if u < v else (v, u)
        hit = self._cache.get(key)
        if hit is None:
            hit = segment_intersects_tree(self.g.nodes[u], self.g.nodes[v], self.tree)
            self._cache[key] = hit
        return hit

    def angle(self, n: int, c: int, d: int) -> bool:
        return self(n, c) or (d != c and self(n, d))


def _hits_for(g: Graph, tree: Tree, hits) -> "EdgeHits":
    if hits is None or hits.tree is not tree:
        hits = EdgeHits(g, tree)
    return hits


def mcfr_source_init(g: Graph, s: int, t: Tree, session: str, ttl: int | None,
                     hits: EdgeHits | None = None) -> list[RoutingMessage]:
    """Inject an L/R pair into every tree-touching angle at the source."""
    if g.nodes[s] != t.source:
        raise ValueError("source node must be the first terminal of the tree")
    hits = _hits_for(g, t, hits)
    out: list[RoutingMessage] = []
    for c, d in g.angles(s):
        if hits.angle(s, c, d):
            out.append(RoutingMessage(session, Kind.FACE_L, s, s, d, ttl, tree=t))
            out.append(RoutingMessage(session, Kind.FACE_R, s, s, c, ttl, tree=t))
    # every edge at a terminal touches the tree there
    assert out or g.degree(s) == 0
    return out


def mcfr_on_receive(g: Graph, n: int, msg: RoutingMessage, sq: Sequence[RoutingMessage],
                    hits: EdgeHits | None = None) -> Actions:
    tree = msg.tree
    if not isinstance(tree, Tree) or not tree.valid or not msg.kind.is_face:
        return Actions(error=True, tags=["malformed"])
    a = msg.sender
    if not g.has_edge(n, a):
        return Actions(error=True, tags=["not-a-neighbor"])

    for pending in sq:
        if pending.receiver == a and mate_of(msg, pending):
            return Actions(cancellations=[pending], tags=["mate"])

    hits = _hits_for(g, tree, hits)
    act = Actions()
    if g.nodes[n] in tree.target_set:
        act.deliveries.append(n)

    if msg.kind is Kind.FACE_L:
        b = g.next_left(n, a)
        wedge = (a, b)
    else:
        b = g.next_right(n, a)
        wedge = (b, a)
    act.enqueues.append(msg.hop(msg.kind, b))

    if hits.angle(n, *wedge):
        for c, d in g.angles(n):
            if c == wedge[0]:
                continue
            if hits.angle(n, c, d):
                act.enqueues.append(msg.hop(Kind.FACE_R, c))
                act.enqueues.append(msg.hop(Kind.FACE_L, d))
                act.tags.append("split")
    elif any(hits.angle(n, c, d) for c, d in g.angles(n)):
        act.tags.append("juncture-via-free-angle")
    return act


# An angle (c, d) at node n, d next-left after c, is keyed as (n, c).

def wedge_at_sender(g: Graph, msg: RoutingMessage) -> tuple[int, int]:
    """Angle the sender was processing when it emitted a face message."""
    n, r = msg.sender, msg.receiver
    if msg.kind is Kind.FACE_L:
        return (n, g.next_right(n, r))
    return (n, r)


def wedge_at_receiver(g: Graph, msg: RoutingMessage) -> tuple[int, int]:
    """Angle the receiver will traverse when it forwards a face message."""
    n, r = msg.sender, msg.receiver
    if msg.kind is Kind.FACE_L:
        return (r, n)
    return (r, g.next_right(r, n))


class MCFR:
    """Per-session driver binding the pure handlers to a graph and tree."""

    def __init__(self, planar_g: Graph, source: int, tree: Tree, session: str = "s0",
                 name: str = "mcfr-steiner"):
        self.g = planar_g
        self.source = source
        self.tree = tree
        self.session = session
        self.name = name
        self.hits = EdgeHits(planar_g, tree)
        self.target_nodes = tuple(planar_g.node_at(p) for p in tree.targets)

    def start(self, ttl: int | None) -> list[RoutingMessage]:
        return mcfr_source_init(self.g, self.source, self.tree, self.session, ttl, self.hits)

    def on_receive(self, n: int, msg: RoutingMessage, queue: Sequence[RoutingMessage]) -> Actions:
        return mcfr_on_receive(self.g, n, msg, queue, self.hits)
