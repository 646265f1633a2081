import pytest

from treecover.checks import run_suite
from treecover.oracle import (OracleReport, _Dense, exhaustive_cover_optimum, naive_greedy_cover,
                              naive_kcenter, naive_median)
from treecover.tree_core import RootedIndex, TreePoint

from conftest import make_instance, path_instance


def test_dense_subdivision_places_edge_locations():
    inst = make_instance(2, [(0, 1, 2.0)], [(1.0, [(TreePoint(0, 1, 0.5), 1.0)])])
    dense = _Dense(inst)
    assert dense.tree.vertex_count == 3
    assert dense.E[0, 0] == pytest.approx(0.5)
    assert dense.E[0, 1] == pytest.approx(1.5)
    assert dense.to_original(0, 2, 0.25) == TreePoint(0, 1, 0.25)


def test_naive_median_on_a_path():
    inst = path_instance([(1.0, {0: 0.2, 1: 0.3, 2: 0.5})])
    assert naive_median(inst, 0, RootedIndex(inst.tree, 0)) in (1, 2)


def test_greedy_and_exhaustive_agree_on_the_path():
    inst = path_instance([(1.0, {0: 1.0}), (1.0, {2: 1.0})])
    assert len(naive_greedy_cover(inst, 1.0)) == 1
    assert exhaustive_cover_optimum(inst, 1.0) == 1
    assert exhaustive_cover_optimum(inst, 0.5) == 2


def test_exhaustive_refuses_large_inputs():
    inst = make_instance(1, [], [(1.0, {0: 1.0})] * 9)
    with pytest.raises(ValueError):
        exhaustive_cover_optimum(inst, 1.0)


def test_naive_kcenter_on_an_edge():
    inst = make_instance(2, [(0, 1, 2.0)], [(1.0, {0: 1.0}), (1.0, {1: 1.0})])
    assert naive_kcenter(inst, 1) == pytest.approx(1.0)


def test_report_tolerance_and_summary():
    rep = OracleReport("demo", 1e-9)
    assert rep.add("close", 1.0 + 1e-12, 1.0)
    assert not rep.add("far", 1.1, 1.0)
    assert not rep.add("exact", [1], [2], numeric=False)
    assert not rep.passed
    assert "1/3 passed" in rep.summary()


@pytest.mark.parametrize("suite", ["median", "ed", "cover", "kcenter"])
def test_check_suites_pass(suite):
    rep = run_suite(suite, range(1, 6))
    assert rep.passed, rep.summary()
