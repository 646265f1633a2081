"""k-center: smallest covering range that needs at most k centers.

The optimum is either some Ed(p_i*, P_i) or the common value of two
expected distances at the balance point c_ij on the path between two
medians.  All those values are generated, sorted, and searched with the
cover solver as the feasibility test.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .candidate_center import Infeasible
from .cover_solver import CoverContext, CoverSolution
from .instance import Instance
from .tree_core import TreePoint


@dataclass
class CandidateValues:
    medians: List[float]
    balance: List[float]
    values: List[float]


@dataclass
class KCenterSolution:
    k: int
    lam_opt: float
    centers: List[TreePoint]
    candidates: List[float] = field(default_factory=list)
    probes: int = 0
    cover: Optional[CoverSolution] = None


def compute_cij(ctx: CoverContext, i: int, j: int) -> Optional[Tuple[TreePoint, float]]:
    """Balance point of P_i and P_j between their medians, with its value.

    None when the expected distances do not cross on that path.
    """
    a3 = ctx.a3
    idx = ctx.mt.index
    tree = ctx.rinst.tree
    mi, mj = ctx.medians[i], ctx.medians[j]

    def ed(v: int, k: int) -> float:
        return a3.query(TreePoint.vertex(v), k)

    if i == j:
        return TreePoint.vertex(mi), ed(mi, i)
    if not (ed(mi, i) <= ed(mi, j) and ed(mj, j) <= ed(mj, i)):
        return None

    def g(v: int) -> float:
        return ed(v, i) - ed(v, j)

    top = idx.lca(mi, mj)
    dtop = idx.depth_hops[top]
    if g(mi) >= 0:
        return TreePoint.vertex(mi), ed(mi, i)
    if g(top) >= 0:
        # crossing between mi and top; g grows toward the root on this side
        lo, hi = dtop, idx.depth_hops[mi]
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if g(idx.level_ancestor(mi, mid)) >= 0:
                lo = mid
            else:
                hi = mid
        a = idx.level_ancestor(mi, hi)   # g < 0
        b = idx.level_ancestor(mi, lo)   # g >= 0, parent of a
    else:
        lo, hi = dtop, idx.depth_hops[mj]
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if g(idx.level_ancestor(mj, mid)) >= 0:
                hi = mid
            else:
                lo = mid
        a = idx.level_ancestor(mj, lo)   # g < 0
        b = idx.level_ancestor(mj, hi)   # g >= 0, child of a
    ga, gb = g(a), g(b)
    if gb == 0:
        return TreePoint.vertex(b), ed(b, i)
    s = -ga / (gb - ga)
    ea, eb = ed(a, i), ed(b, i)
    length = tree.edge_length(a, b)
    return TreePoint.on_edge(tree, a, b, s * length), ea + (eb - ea) * s


def build_candidates(ctx: CoverContext) -> CandidateValues:
    n = ctx.rinst.n
    med = list(ctx.median_values)
    bal = []
    for i in range(n):
        for j in range(i + 1, n):
            r = compute_cij(ctx, i, j)
            bal.append(0.0 if r is None else r[1])
    return CandidateValues(med, bal, sorted(set(med) | set(bal)))


def solve_kcenter(inst: Instance, k: int, ctx: Optional[CoverContext] = None) -> KCenterSolution:
    if k < 1:
        raise ValueError("k must be at least 1")
    if ctx is None:
        ctx = CoverContext(inst)
    values = build_candidates(ctx).values
    probes = 0
    cache = {}

    def attempt(lam: float) -> Optional[CoverSolution]:
        nonlocal probes
        if lam not in cache:
            probes += 1
            try:
                sol = ctx.solve(lam)
            except Infeasible:
                sol = None
            cache[lam] = sol if sol is not None and len(sol.centers) <= k else None
        return cache[lam]

    lo, hi = 0, len(values) - 1
    if attempt(values[hi]) is None:
        raise AssertionError("largest candidate value is not feasible")
    while lo < hi:
        mid = (lo + hi) // 2
        if attempt(values[mid]) is not None:
            hi = mid
        else:
            lo = mid + 1
    best = attempt(values[lo])
    return KCenterSolution(k, values[lo], best.centers, values, probes, best)
