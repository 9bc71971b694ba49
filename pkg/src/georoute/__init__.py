"""Geographic multicast routing: planar-graph face routing over Euclidean trees and baselines."""

from .geometry import Point
from .netgraph import Graph, gabriel_subgraph, random_placement, unit_disk_graph
from .protocols import ALGORITHMS, make_protocol
from .simengine import SimConfig, Transcript, run
from .trees import Tree, euclidean_mst, steiner_tree

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS", "Graph", "Point", "SimConfig", "Transcript", "Tree", "euclidean_mst",
    "gabriel_subgraph", "make_protocol", "random_placement", "run", "steiner_tree",
    "unit_disk_graph",
]
