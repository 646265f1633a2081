import pytest
from hypothesis import given, settings, strategies as st

from treecover.candidate_center import Infeasible
from treecover.cover_solver import CoverContext, RangeStatus, solution_to_dict, solve_cover, verify_solution
from treecover.instance import generate_random
from treecover.oracle import exhaustive_cover_optimum, naive_greedy_cover

from conftest import path_instance, random_small


def test_range_status():
    rs = RangeStatus(5)
    rs.remove(1)
    rs.remove(2)
    assert rs.successor(1) == 3
    assert not rs.any_active(1, 2)
    assert rs.any_active(0, 1)


def test_path_examples():
    inst = path_instance([(1.0, {0: 1.0}), (1.0, {2: 1.0})])
    one = solve_cover(inst, 1.0)
    assert len(one.centers) == 1 and one.centers[0].u == 1 and one.centers[0].is_vertex
    two = solve_cover(inst, 0.5)
    assert len(two.centers) == 2
    assert verify_solution(inst, 0.5, two)
    assert solution_to_dict(inst, one)["covered_by"] == [0, 0]


def test_infeasible_lambda():
    inst = path_instance([(1.0, {0: 0.5, 2: 0.5})])
    with pytest.raises(Infeasible):
        solve_cover(inst, 0.99)


def test_context_is_reusable_across_lambdas():
    inst = generate_random(9, 50, 15, 4)
    ctx = CoverContext(inst)
    top = max(ctx.median_values)
    counts = [len(ctx.solve(top * f).centers) for f in (1.0, 1.5, 3.0, 10.0)]
    assert counts == sorted(counts, reverse=True)
    assert counts[-1] == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_greedy_matches_oracles(seed):
    rng, inst = random_small(seed, max_n=7, max_t=40)
    ctx = CoverContext(inst)
    lam = max(ctx.median_values) * rng.uniform(1.0, 2.0)
    sol = ctx.solve(lam)
    assert verify_solution(inst, lam, sol)
    assert len(sol.centers) == len(naive_greedy_cover(inst, lam))
    if inst.n <= 6:
        assert len(sol.centers) == exhaustive_cover_optimum(inst, lam)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_solutions_are_tight_deterministic_and_minimal(seed):
    rng, inst = random_small(seed, max_n=8, max_t=40)
    ctx = CoverContext(inst)
    lam = max(ctx.median_values) * rng.uniform(1.0, 2.0)
    sol = ctx.solve(lam, debug=True)
    again = CoverContext(inst).solve(lam)
    assert again.centers == sol.centers and again.covered_by == sol.covered_by
    # dropping any center of a minimum cover must break it
    for k in range(len(sol.centers)):
        fewer = type(sol)(lam, sol.centers[:k] + sol.centers[k + 1:], sol.covered_by)
        assert not verify_solution(inst, lam, fewer)
    # every center is the root or sits at lambda for a point it covered
    a3, rinst = ctx.a3, ctx.rinst
    for cid, c in enumerate(sol.reduced_centers):
        if c.is_vertex and c.u == ctx.mt.root:
            continue
        mine = [i for i, b in enumerate(sol.covered_by) if b == cid]
        assert max(a3.query(c, i) for i in mine) >= lam - 1e-9


def test_empty_solution_fails_verification():
    inst = path_instance([(1.0, {0: 1.0})])
    sol = solve_cover(inst, 1.0)
    assert not verify_solution(inst, 1.0, type(sol)(1.0, [], []))
