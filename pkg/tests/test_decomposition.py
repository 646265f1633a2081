import pytest
from hypothesis import given, settings, strategies as st

from treecover.decomposition import (EDGE_LEAF, INTERNAL, VERTEX_LEAF, check_invariants,
                                     decompose, find_centroid, outside_subtree,
                                     outside_vertices, piece_connectors, to_dot)
from treecover.reduction import reduce

from conftest import make_instance, path_instance, random_small


def test_path_of_three_splits_at_the_middle():
    inst = path_instance([(1.0, {0: 1.0}), (1.0, {1: 1.0}), (1.0, {2: 1.0})])
    dt = decompose(inst)
    root = dt.nodes[dt.root]
    assert root.kind == INTERNAL and root.centroid == 1
    assert root.connectors == []


def test_star_splits_at_its_center():
    edges = [(0, k, 1.0) for k in range(1, 6)]
    inst = make_instance(6, edges, [(1.0, {k: 1.0}) for k in range(1, 6)])
    assert decompose(inst).nodes[0].centroid == 0
    assert find_centroid(inst.tree, list(range(5)), set(range(6)), [0] + [1] * 5) == 0


def test_single_edge_has_three_leaves():
    inst = make_instance(2, [(0, 1, 1.0)], [(1.0, {0: 0.5, 1: 0.5})])
    dt = decompose(inst)
    root = dt.nodes[dt.root]
    kinds = sorted(dt.nodes[c].kind for c in root.children)
    assert kinds == sorted([VERTEX_LEAF, EDGE_LEAF, VERTEX_LEAF])
    assert sorted(root.cut_vertices) == [0, 1]
    edge_leaf = next(dt.nodes[c] for c in root.children if dt.nodes[c].kind == EDGE_LEAF)
    assert edge_leaf.leaf_edge == (0, 1)
    assert sorted(edge_leaf.connectors) == [0, 1]


def test_single_vertex_is_one_leaf():
    inst = make_instance(1, [], [(1.0, {0: 1.0})])
    dt = decompose(inst)
    assert len(dt.nodes) == 1
    assert dt.nodes[0].kind == VERTEX_LEAF and dt.leaf_of_vertex == [0]


def _edges_of(dt, node):
    """Edge ids below a node, from its edge leaves."""
    out, stack = [], [node]
    while stack:
        nd = dt.nodes[stack.pop()]
        if nd.kind == EDGE_LEAF:
            out.append(dt.tree.edge_id(*nd.leaf_edge))
        stack.extend(nd.children)
    return out


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_structure_on_random_instances(seed):
    _, inst = random_small(seed, max_n=10, max_t=80, vertex_constrained=True)
    dt = decompose(inst)
    assert check_invariants(dt) == []
    t = inst.tree.vertex_count
    # every vertex is closed in exactly one leaf, leaves in DFS order
    assert sorted(dt.leaf_order) == list(range(t))
    for nd in dt.nodes:
        closed = set(dt.closed_vertices(nd.id))
        if nd.kind == INTERNAL:
            below = set()
            for c in nd.children:
                below |= set(dt.closed_vertices(c))
            assert below == closed
            assert piece_connectors(dt.tree, _edges_of(dt, nd.id), closed) == sorted(nd.connectors)
        assert nd.size == sum(dt.location_count[v] for v in closed)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_outside_world_is_the_far_side_of_each_connector(seed):
    _, inst = random_small(seed, max_n=8, max_t=60, vertex_constrained=True)
    dt = decompose(inst)
    tree = inst.tree
    for nd in dt.nodes:
        inside = set(dt.closed_vertices(nd.id))
        for y in nd.connectors:
            # vertices reachable from y without passing through the node's piece
            far, stack = set(), [y]
            seen = {y}
            while stack:
                a = stack.pop()
                if a != y:
                    far.add(a)
                for b, _, _ in tree.adjacency[a]:
                    if b not in seen and b not in inside and not (a == y and _crosses_piece(dt, nd.id, y, b)):
                        seen.add(b)
                        stack.append(b)
            got = outside_vertices(dt, nd.id, y)
            assert len(got) == len(set(got))
            assert set(got) == (far | {y}) - inside


def _crosses_piece(dt, node, y, b):
    """Whether edge (y, b) belongs to the node's piece."""
    eid = dt.tree.edge_id(y, b)
    return eid in _edges_of(dt, node)


def test_outside_subtree_rejects_non_connectors():
    inst = path_instance([(1.0, {0: 1.0}), (1.0, {2: 1.0})])
    dt = decompose(inst)
    with pytest.raises(ValueError):
        outside_subtree(dt, dt.root, 0)


def test_size_bound_on_a_larger_reduced_instance():
    from treecover.instance import generate_random
    inst = reduce(generate_random(4, 400, 60, 6)).reduced
    dt = decompose(inst)
    assert check_invariants(dt) == []
    assert to_dot(dt).startswith("digraph")
