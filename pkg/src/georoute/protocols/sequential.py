"""Sequential multicast baselines built on greedy/perimeter unicast.

All of them move one message per subtree of a Euclidean tree rooted at the
current custodian and split the message when a waypoint is reached:

* unicast to every target separately (star tree),
* LGS: minimum spanning tree computed once at the source,
* GMP: Steiner tree recomputed by every custodian in greedy mode,
* GMP-source: Steiner tree computed once at the source.

A real waypoint is reached on arrival at the node with its coordinates; a
virtual (Steiner) waypoint is reached at the first custodian that has no
neighbor closer to it.
"""

from __future__ import annotations

from typing import Callable, Sequence

from ..geometry import Point
from ..netgraph import Graph
from ..trees import Branch, Tree, euclidean_mst, rooted, steiner_tree
from .gfg import gfg_next_hop, greedy_next
from .messages import Actions, Kind, RoutingMessage


def virtual_reached(g: Graph, n: int, waypoint: Point) -> bool:
    """Arrival rule for virtual waypoints: greedy local minimum with respect to it."""
    return greedy_next(g, n, waypoint) is None


def star(source: Point, targets: Sequence[Point]) -> Branch:
    return Branch(source, False, tuple(Branch(t, True) for t in targets))


class TreeMulticast:
    """Sequential tree-following multicast session.

    ``tree_fn`` maps terminals (custodian first) to a Tree; with ``recompute``
    the custodian rebuilds it at every greedy-mode hop, otherwise the source's
    tree travels with the message as a Branch.
    """

    def __init__(self, g: Graph, planar_g: Graph, source: int, targets: Sequence[int],
                 tree_fn: Callable[[Sequence[Point]], Tree] | None, recompute: bool = False,
                 session: str = "s0", name: str = "sequential"):
        self.g = g
        self.planar_g = planar_g
        self.source = source
        self.target_nodes = tuple(targets)
        self.tree_fn = tree_fn
        self.recompute = recompute
        self.session = session
        self.name = name
        P = g.nodes
        self.target_points = tuple(P[t] for t in self.target_nodes)
        if tree_fn is None:
            self.plan = star(P[source], self.target_points)
            self.tree = None
        else:
            self.tree = tree_fn((P[source],) + self.target_points)
            self.plan = rooted(self.tree, 0)

    # -- helpers ---------------------------------------------------------

    def _plan_at(self, n: int, targets: Sequence[Point]) -> tuple[Branch, ...]:
        here = self.g.nodes[n]
        if len(targets) == 1:
            return (Branch(targets[0], True),)
        return rooted(self.tree_fn((here,) + tuple(targets)), 0).children

    def _dispatch(self, n: int, branches: Sequence[Branch], template: RoutingMessage,
                  act: Actions, fresh: bool) -> None:
        """Send one message per branch from custodian n, expanding reached waypoints."""
        here = self.g.nodes[n]
        todo = list(branches)
        while todo:
            br = todo.pop(0)
            if br.point == here:
                if br.is_target:
                    act.deliveries.append(n)
                todo[:0] = br.children
                continue
            if not br.is_target and virtual_reached(self.g, n, br.point):
                todo[:0] = br.children
                continue
            nxt, rec = gfg_next_hop(self.g, self.planar_g, n, None, br.point, None)
            if nxt is None:
                act.tags.append("stranded")
                continue
            kind = Kind.GREEDY if rec is None else Kind.RECOVERY
            route = Branch(br.point, br.is_target) if self.recompute else br
            targets = tuple(br.targets())
            if fresh:
                act.enqueues.append(RoutingMessage(self.session, kind, self.source, n, nxt,
                                                   template.ttl, route=route, targets=targets,
                                                   recovery=rec))
            else:
                act.enqueues.append(template.hop(kind, nxt, route=route, targets=targets,
                                                 recovery=rec))

    # -- protocol surface ------------------------------------------------

    def start(self, ttl: int | None) -> list[RoutingMessage]:
        template = RoutingMessage(self.session, Kind.GREEDY, self.source, self.source,
                                  self.source, ttl)
        act = Actions()
        branches = self.plan.children
        if self.recompute and self.target_points:
            branches = self._plan_at(self.source, self.target_points)
        self._dispatch(self.source, branches, template, act, fresh=True)
        return act.enqueues

    def on_receive(self, n: int, msg: RoutingMessage, queue: Sequence[RoutingMessage]) -> Actions:
        act = Actions()
        if msg.route is None:
            act.error = True
            act.tags.append("malformed")
            return act
        here = self.g.nodes[n]
        wp = msg.route

        if self.recompute:
            remaining = [t for t in msg.targets if t != here]
            if len(remaining) != len(msg.targets):
                act.deliveries.append(n)
            if not remaining:
                return act
            if msg.kind is Kind.RECOVERY and wp.point != here:
                nxt, rec = gfg_next_hop(self.g, self.planar_g, n, msg.sender, wp.point, msg.recovery)
                if rec is not None and nxt is not None:
                    act.enqueues.append(msg.hop(Kind.RECOVERY, nxt, targets=tuple(remaining),
                                                recovery=rec))
                    return act
            self._dispatch(n, self._plan_at(n, remaining), msg, act, fresh=False)
            return act

        if wp.point == here:
            self._dispatch(n, (wp,), msg, act, fresh=False)
            return act
        if (not wp.is_target and msg.kind is Kind.GREEDY
                and virtual_reached(self.g, n, wp.point)):
            self._dispatch(n, wp.children, msg, act, fresh=False)
            return act
        sender = msg.sender if msg.kind is Kind.RECOVERY else None
        nxt, rec = gfg_next_hop(self.g, self.planar_g, n, sender, wp.point, msg.recovery)
        if nxt is None:
            act.tags.append("stranded")
            return act
        kind = Kind.GREEDY if rec is None else Kind.RECOVERY
        act.enqueues.append(msg.hop(kind, nxt, recovery=rec))
        return act


def gfg_multi_unicast(g, planar_g, s, targets, session="s0") -> TreeMulticast:
    return TreeMulticast(g, planar_g, s, targets, None, session=session, name="gfg-unicast")


def lgs_route(g, planar_g, s, targets, session="s0") -> TreeMulticast:
    return TreeMulticast(g, planar_g, s, targets, euclidean_mst, session=session, name="lgs")


def gmp_route(g, planar_g, s, targets, session="s0", recompute: bool = True) -> TreeMulticast:
    return TreeMulticast(g, planar_g, s, targets, steiner_tree, recompute=recompute,
                         session=session, name="gmp" if recompute else "gmp-source")
