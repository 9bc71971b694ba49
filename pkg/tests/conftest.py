import math
import random
from types import SimpleNamespace

import pytest

from georoute.geometry import Point
from georoute.netgraph import Graph, gabriel_subgraph, unit_disk_graph
from georoute.trees import Tree

THREE_FACES_NAMES = "s a b f i j d k".split()
THREE_FACES_COORDS = dict(s=(0, 0), a=(1, 2), b=(3, 2), f=(4, 0), i=(2, -1), j=(3, -3),
                   d=(6, 2), k=(6, -2))
THREE_FACES_EDGES = "s-a a-b b-f f-i i-s b-d d-f f-k k-j j-i".split()


def build_three_faces():
    """Faces F = s a b f i, G = b d f, H = i f k j; tree s-x-b, x-y, y-d, y-k
    with virtual x inside H so that segment s-x crosses edge i-f."""
    idx = {n: i for i, n in enumerate(THREE_FACES_NAMES)}
    g = Graph.from_edges([Point(*THREE_FACES_COORDS[n]) for n in THREE_FACES_NAMES],
                         [(idx[e[0]], idx[e[2]]) for e in THREE_FACES_EDGES], 10.0)
    x, y = Point(4.5, -0.8), Point(5.5, 0.0)
    term = tuple(Point(*THREE_FACES_COORDS[n]) for n in "sbdk")
    tree = Tree(term, (x, y), ((0, 4), (4, 1), (4, 5), (5, 2), (5, 3)))
    return SimpleNamespace(g=g, tree=tree, idx=idx, names=THREE_FACES_NAMES, x=x, y=y)


@pytest.fixture
def three_faces():
    return build_three_faces()


def random_udg(n, side, radius, seed):
    rng = random.Random(seed)
    pts = list({Point(rng.uniform(0, side), rng.uniform(0, side)) for _ in range(n)})
    pts.sort()
    return unit_disk_graph(pts, radius)


def small_instance(seed, n=None, m=None):
    """Small connected-ish field with a random source and targets."""
    rng = random.Random(f"small:{seed}")
    n = n or rng.randint(12, 60)
    side = math.sqrt(n * math.pi * 100.0 ** 2 / rng.uniform(5, 10))
    g = random_udg(n, side, 100.0, rng.random())
    pg = gabriel_subgraph(g)
    s = rng.randrange(len(g))
    m = m or rng.randint(1, min(5, len(g) - 1))
    targets = rng.sample([v for v in range(len(g)) if v != s], m)
    return g, pg, s, targets


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
