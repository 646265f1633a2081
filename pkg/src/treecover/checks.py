"""Randomised cross-checks of the fast structures against the brute-force oracles."""

from __future__ import annotations

import random
from typing import Iterable

from .cover_solver import CoverContext, verify_solution
from .decomposition import decompose
from .dist_oracle import build_a3, build_info_lists
from .instance import expected_distance_naive, generate_random
from .kcenter_solver import solve_kcenter
from .medians import compute_medians
from .oracle import OracleReport, naive_greedy_cover, naive_kcenter, naive_median
from .tree_core import RootedIndex, TreePoint


def _small_instance(seed: int, vertex_constrained: bool, max_n: int = 10, max_t: int = 60):
    rng = random.Random(seed)
    n = rng.randint(1, max_n)
    max_m = rng.randint(1, 8)
    if vertex_constrained:
        t = rng.randint(1, min(max_t, n * max_m))
    else:
        t = rng.randint(1, max_t // 2)
    return rng, generate_random(seed, t, n, max_m, vertex_constrained)


def _random_point(rng: random.Random, tree) -> TreePoint:
    if tree.vertex_count > 1 and rng.random() < 0.5:
        u, v, length = tree.edges[rng.randrange(tree.vertex_count - 1)]
        return TreePoint.on_edge(tree, u, v, rng.random() * length)
    return TreePoint.vertex(rng.randrange(tree.vertex_count))


def check_median(seed: int, report: OracleReport) -> None:
    rng, inst = _small_instance(seed, True)
    index = RootedIndex(inst.tree, 0)
    dt = decompose(inst, index)
    med = compute_medians(inst, dt, build_info_lists(inst, dt, index))
    for i in range(inst.n):
        fast = expected_distance_naive(inst, index, TreePoint.vertex(med[i]), i)
        ref = expected_distance_naive(inst, index, TreePoint.vertex(naive_median(inst, i, index)), i)
        report.add(f"seed {seed} point {i}", fast, ref)


def check_ed(seed: int, report: OracleReport, queries: int = 20) -> None:
    rng, inst = _small_instance(seed, True)
    index = RootedIndex(inst.tree, 0)
    a3 = build_a3(inst, decompose(inst, index), index)
    for q in range(queries):
        x = _random_point(rng, inst.tree)
        i = rng.randrange(inst.n)
        report.add(f"seed {seed} query {q}", a3.query(x, i),
                   expected_distance_naive(inst, index, x, i))


def check_cover(seed: int, report: OracleReport) -> None:
    rng, inst = _small_instance(seed, rng_flag(seed))
    ctx = CoverContext(inst)
    lam = max(ctx.median_values) * (1.0 + rng.random())
    sol = ctx.solve(lam)
    report.add(f"seed {seed} verified", verify_solution(inst, lam, sol), True, numeric=False)
    report.add(f"seed {seed} centers", len(sol.centers), len(naive_greedy_cover(inst, lam)),
               numeric=False)


def check_kcenter(seed: int, report: OracleReport) -> None:
    rng, inst = _small_instance(seed, rng_flag(seed), max_n=8, max_t=40)
    k = rng.randint(1, inst.n)
    report.add(f"seed {seed} k={k}", solve_kcenter(inst, k).lam_opt, naive_kcenter(inst, k))


def rng_flag(seed: int) -> bool:
    """Alternate between vertex-constrained and general instances."""
    return seed % 2 == 0


SUITES = {
    "median": (check_median, 1e-9),
    "ed": (check_ed, 1e-9),
    "cover": (check_cover, 0.0),
    "kcenter": (check_kcenter, 1e-9),
}


def run_suite(name: str, seeds: Iterable[int]) -> OracleReport:
    fn, tol = SUITES[name]
    report = OracleReport(name, tol)
    for seed in seeds:
        fn(seed, report)
    return report
