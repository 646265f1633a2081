import pytest
from hypothesis import given, settings, strategies as st

from treecover.decomposition import decompose
from treecover.dist_oracle import build_info_lists
from treecover.instance import expected_distance_at_vertices
from treecover.medians import build_median_tree, compute_medians, exhaustive_probability_check
from treecover.oracle import naive_median
from treecover.tree_core import RootedIndex

from conftest import make_instance, path_instance, random_small


def _medians(inst):
    index = RootedIndex(inst.tree, 0)
    dt = decompose(inst, index)
    return compute_medians(inst, dt, build_info_lists(inst, dt, index))


def test_split_mass_on_a_path():
    inst = path_instance([(1.0, {0: 0.5, 2: 0.5})])
    (m,) = _medians(inst)
    eds = expected_distance_at_vertices(inst, RootedIndex(inst.tree, 0), 0)
    assert eds[m] == pytest.approx(1.0)


def test_exhaustive_check_points_to_the_heavy_side():
    inst = path_instance([(1.0, {0: 0.6, 2: 0.4}), (1.0, {0: 0.5, 2: 0.5})])
    assert exhaustive_probability_check(inst, 0, 1) == ("side", 0)
    assert exhaustive_probability_check(inst, 1, 1) == ("at", 1)


def test_heavy_vertex_is_the_median():
    edges = [(0, k, 1.0) for k in range(1, 5)]
    inst = make_instance(5, edges, [(2.0, {3: 0.7, 1: 0.1, 2: 0.1, 4: 0.1})])
    assert _medians(inst) == [3]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_medians_minimise_expected_distance(seed):
    _, inst = random_small(seed, vertex_constrained=True)
    meds = _medians(inst)
    index = RootedIndex(inst.tree, 0)
    for i, m in enumerate(meds):
        eds = expected_distance_at_vertices(inst, index, i)
        best = eds[naive_median(inst, i, index)]
        assert eds[m] <= best * (1 + 1e-9) + 1e-12
        # a median is never on the side of a heavy component
        assert exhaustive_probability_check(inst, i, m) == ("at", m)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_median_tree_ranks_are_post_order_ranges(seed):
    _, inst = random_small(seed, vertex_constrained=True)
    meds = _medians(inst)
    mt = build_median_tree(inst, meds)
    assert mt.root == meds[0]
    assert mt.rank[0] == inst.n - 1
    assert sorted(mt.order) == list(range(inst.n))
    idx = mt.index
    for v in range(inst.tree.vertex_count):
        if not mt.in_tm[v]:
            assert mt.range_lo[v] == -1
            continue
        below = {i for i, m in enumerate(meds) if idx.is_ancestor(v, m)}
        ranks = sorted(mt.rank[i] for i in below)
        assert ranks == list(range(mt.range_lo[v], mt.range_hi[v] + 1))
    # T_m is exactly the union of root paths of the medians
    on_paths = set()
    for m in meds:
        while m >= 0:
            on_paths.add(m)
            m = idx.parent[m]
    assert on_paths == {v for v in range(inst.tree.vertex_count) if mt.in_tm[v]}


def test_single_point_median_tree():
    inst = path_instance([(1.0, {1: 1.0})])
    mt = build_median_tree(inst, _medians(inst))
    assert mt.root == 1 and (mt.range_lo[1], mt.range_hi[1]) == (0, 0)
    assert sum(mt.in_tm) == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_expected_distance_grows_toward_the_root(seed):
    _, inst = random_small(seed, vertex_constrained=True)
    meds = _medians(inst)
    mt = build_median_tree(inst, meds)
    idx = mt.index
    for i, m in enumerate(meds):
        eds = expected_distance_at_vertices(inst, idx, i)
        v = m
        while idx.parent[v] >= 0:
            assert eds[idx.parent[v]] >= eds[v] * (1 - 1e-12) - 1e-12
            v = idx.parent[v]
