"""Routing protocol state machines: handlers are pure, state lives in the simulator."""

from __future__ import annotations

from typing import Sequence

from ..netgraph import Graph
from ..trees import euclidean_mst, steiner_tree
from .gfg import gfg_next_hop, gfg_unicast_step, greedy_next
from .mcfr import MCFR, EdgeHits, mcfr_on_receive, mcfr_source_init
from .messages import Actions, Kind, Recovery, RoutingMessage, RoutingProtocol, mate_of
from .sequential import TreeMulticast, gfg_multi_unicast, gmp_route, lgs_route

ALGORITHMS = ("gfg-unicast", "lgs", "gmp", "gmp-source", "mcfr-steiner", "mcfr-mst")


def make_protocol(name: str, g: Graph, planar_g: Graph, source: int, targets: Sequence[int],
                  session: str = "s0") -> RoutingProtocol:
    """Build a session of the named algorithm for one source and target set."""
    targets = list(targets)
    if name == "gfg-unicast":
        return gfg_multi_unicast(g, planar_g, source, targets, session)
    if name == "lgs":
        return lgs_route(g, planar_g, source, targets, session)
    if name == "gmp":
        return gmp_route(g, planar_g, source, targets, session, recompute=True)
    if name == "gmp-source":
        return gmp_route(g, planar_g, source, targets, session, recompute=False)
    if name in ("mcfr-steiner", "mcfr-mst"):
        fn = steiner_tree if name == "mcfr-steiner" else euclidean_mst
        P = planar_g.nodes
        tree = fn([P[source]] + [P[t] for t in targets])
        return MCFR(planar_g, source, tree, session, name)
    raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")


__all__ = [
    "ALGORITHMS", "Actions", "EdgeHits", "Kind", "MCFR", "Recovery", "RoutingMessage",
    "RoutingProtocol", "TreeMulticast", "gfg_multi_unicast", "gfg_next_hop", "gfg_unicast_step",
    "gmp_route", "greedy_next", "lgs_route", "make_protocol", "mate_of", "mcfr_on_receive",
    "mcfr_source_init",
]
