import random

import pytest

from treecover.instance import Instance, Location, UncertainPoint, generate_random
from treecover.tree_core import Tree, TreePoint

# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def make_instance(t, edges, points):
    """points: list of (weight, {vertex: prob}) or (weight, [(TreePoint, prob)])."""
    tree = Tree(t, edges)
    pts = []
    for w, locs in points:
        if isinstance(locs, dict):
            locs = [(TreePoint.vertex(v), f) for v, f in locs.items()]
        pts.append(UncertainPoint(w, [Location(p, f) for p, f in locs]))
    return Instance(tree, pts)


def path_instance(points, lengths=(1.0, 1.0)):
    """Path 0-1-2 (a-b-c) with the given edge lengths."""
    edges = [(k, k + 1, length) for k, length in enumerate(lengths)]
    return make_instance(len(lengths) + 1, edges, points)


def random_small(seed, max_n=12, max_t=100, vertex_constrained=None):
    rng = random.Random(seed)
    n = rng.randint(1, max_n)
    max_m = rng.randint(1, 8)
    vc = rng.random() < 0.5 if vertex_constrained is None else vertex_constrained
    if vc:
        t = rng.randint(1, min(max_t, n * max_m))
    else:
        t = rng.randint(1, max(1, max_t // 2))
    return rng, generate_random(seed, t, n, max_m, vc)


def random_point(rng, tree):
    if tree.vertex_count > 1 and rng.random() < 0.5:
        u, v, length = tree.edges[rng.randrange(tree.vertex_count - 1)]
        return TreePoint.on_edge(tree, u, v, rng.random() * length)
    return TreePoint.vertex(rng.randrange(tree.vertex_count))


@pytest.fixture
def record_acceptance():
    def record(number, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
