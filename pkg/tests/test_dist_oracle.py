import random

import pytest
from hypothesis import given, settings, strategies as st

from treecover.decomposition import decompose
from treecover.dist_oracle import build_a3, edge_linear_form, query_ed
from treecover.instance import expected_distance_naive
from treecover.oracle import _Dense
from treecover.tree_core import RootedIndex, TreePoint

from conftest import path_instance, random_point, random_small


def _a3(inst):
    index = RootedIndex(inst.tree, 0)
    return build_a3(inst, decompose(inst, index), index), index


def test_midpoint_value():
    inst = path_instance([(1.0, {0: 0.5, 2: 0.5})])
    a3, _ = _a3(inst)
    assert query_ed(a3, TreePoint.on_edge(inst.tree, 0, 1, 0.5), 0) == pytest.approx(1.0)
    assert query_ed(a3, TreePoint.vertex(0), 0) == pytest.approx(1.0)


def test_edge_form_is_exact_on_vertex_constrained_edges():
    inst = path_instance([(2.0, {0: 0.25, 2: 0.75})], lengths=(1.0, 3.0))
    a3, index = _a3(inst)
    form = edge_linear_form(a3, 1, 2, 0)
    for s in (0.0, 0.7, 3.0):
        x = TreePoint.on_edge(inst.tree, 1, 2, s)
        assert form.at(s) == pytest.approx(expected_distance_naive(inst, index, x, 0))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_matches_direct_sums(seed):
    rng, inst = random_small(seed, vertex_constrained=True)
    a3, index = _a3(inst)
    dense = _Dense(inst)
    for _ in range(15):
        x = random_point(rng, inst.tree)
        i = rng.randrange(inst.n)
        want = expected_distance_naive(inst, index, x, i)
        assert a3.query(x, i) == pytest.approx(want, rel=1e-9, abs=1e-12)
    # every vertex against the dense matrix of the oracle
    for v in range(inst.tree.vertex_count):
        i = rng.randrange(inst.n)
        assert a3.query(TreePoint.vertex(v), i) == pytest.approx(
            dense.E[i, v], rel=1e-9, abs=1e-12)


def test_zero_weight_point_is_zero_everywhere():
    inst = path_instance([(0.0, {0: 1.0}), (1.0, {2: 1.0})])
    a3, _ = _a3(inst)
    rng = random.Random(0)
    for _ in range(10):
        assert a3.query(random_point(rng, inst.tree), 0) == 0.0
