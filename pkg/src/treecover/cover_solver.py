"""Minimum number of centers covering every uncertain point within lambda.

The greedy walks the median-spanning tree bottom-up.  At a vertex v with
uncovered medians below it, the candidate center is the point closest to
the root that still covers all of them; a center is placed only when that
point lies on the edge from v up to its parent (v included), since
otherwise a later vertex can place it at least as high.  Every center
deactivates what it covers in all structures at once.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

from .candidate_center import A2, INFEASIBLE, UNCONSTRAINED, Infeasible
from .coverage_index import A1
from .decomposition import DecompTree, decompose
from .dist_oracle import A3, InfoLists, build_info_lists
from .instance import Instance, cover_limit, expected_distance_naive, point_to_json
from .medians import MedianTree, build_median_tree, compute_medians
from .reduction import VCInstance, map_back, reduce
from .tree_core import RootedIndex, TreePoint

log = logging.getLogger(__name__)


class RangeStatus:
    """Active ranks with "is any rank in [lo, hi] still active?" queries."""

    def __init__(self, n: int):
        self.n = n
        self._next = list(range(n + 1))

    def _find(self, k: int) -> int:
        nxt = self._next
        root = k
        while nxt[root] != root:
            root = nxt[root]
        while nxt[k] != root:
            nxt[k], k = root, nxt[k]
        return root

    def successor(self, k: int) -> int:
        """Smallest active rank >= k, or n."""
        return self._find(k)

    def any_active(self, lo: int, hi: int) -> bool:
        return self._find(lo) <= hi

    def remove(self, k: int) -> None:
        if self._find(k) == k and k < self.n:
            self._next[k] = k + 1


@dataclass
class CoverSolution:
    lam: float
    centers: List[TreePoint]
    covered_by: List[int]
    stats: Dict[str, int] = field(default_factory=dict)
    # centers on the reduced tree, before mapping back
    reduced_centers: List[TreePoint] = field(default_factory=list)


class CoverContext:
    """Everything about an instance that does not depend on lambda."""

    def __init__(self, inst: Instance):
        self.inst = inst
        self.vc: VCInstance = reduce(inst)
        rinst = self.vc.reduced
        self.rinst = rinst
        self.index0 = RootedIndex(rinst.tree, 0)
        self.dt: DecompTree = decompose(rinst, self.index0)
        self.info: InfoLists = build_info_lists(rinst, self.dt, self.index0)
        self.a3 = A3(rinst, self.info)
        self.medians = compute_medians(rinst, self.dt, self.info)
        self.mt: MedianTree = build_median_tree(rinst, self.medians)
        self.median_values = [self.a3.query(TreePoint.vertex(self.medians[i]), i)
                              for i in range(rinst.n)]
        # T_m vertices in post-order, leftmost leaf first
        order: List[int] = []
        stack = [(self.mt.root, 0)]
        kids = self.mt.tm_children
        while stack:
            v, it = stack.pop()
            if it < len(kids[v]):
                stack.append((v, it + 1))
                stack.append((kids[v][it], 0))
            else:
                order.append(v)
        self.postorder = order

    def check_feasible(self, lam: float) -> None:
        limit = cover_limit(lam)
        for i, val in enumerate(self.median_values):
            if val > limit:
                raise Infeasible(i, val, lam)

    def solve(self, lam: float,
              trace: Optional[Callable[[int, TreePoint, List[int]], None]] = None,
              debug: bool = False) -> CoverSolution:
        """Greedy cover at lam.  With debug, the walk's invariant is asserted
        at every vertex: active medians below v are covered from v."""
        if not (lam >= 0):
            raise ValueError("lambda must be non-negative")
        self.check_feasible(lam)
        rinst, mt = self.rinst, self.mt
        n = rinst.n
        a1 = A1(rinst, self.a3, lam)
        a2 = A2(rinst, mt, self.a3, lam)
        rs = RangeStatus(n)
        covered_by = [-1] * n
        centers: List[TreePoint] = []
        stats = {"range_status": 0, "candidate": 0, "coverage_report": 0, "defensive": 0}

        def place(x: TreePoint) -> None:
            cid = len(centers)
            centers.append(x)
            stats["coverage_report"] += 1
            got = a1.coverage_report(x)
            for i in got:
                r = mt.rank[i]
                a2.remove(r)
                rs.remove(r)
                covered_by[i] = cid
            if trace is not None:
                trace(cid, x, got)

        for v in self.postorder:
            lo, hi = mt.range_lo[v], mt.range_hi[v]
            stats["range_status"] += 1
            if not rs.any_active(lo, hi):
                continue
            if debug:
                self._assert_reachable(v, lo, hi, rs, a2.limit)
            if v == mt.root:
                place(TreePoint.vertex(v))
                continue
            stats["candidate"] += 1
            c = a2.query(lo, hi)
            if c is UNCONSTRAINED:
                continue
            if c is INFEASIBLE:
                # cannot happen while the walk's invariant holds; stay safe
                stats["defensive"] += 1
                log.warning("candidate query infeasible at vertex %d", v)
                place(TreePoint.vertex(v))
                continue
            if c[0] == v:
                place(a2.to_tree_point(c))
        missing = [i for i in range(n) if covered_by[i] < 0]
        if missing:
            raise AssertionError(f"points left uncovered: {missing[:10]}")
        return CoverSolution(lam, map_back(self.vc, centers), covered_by, stats, centers)


    def _assert_reachable(self, v: int, lo: int, hi: int, rs: RangeStatus, limit: float) -> None:
        r = rs.successor(lo)
        while r <= hi:
            i = self.mt.order[r]
            ed = self.a3.query(TreePoint.vertex(v), i)
            if ed > limit:
                raise AssertionError(f"point {i} active below vertex {v} with Ed {ed!r} > {limit!r}")
            r = rs.successor(r + 1)


def solve_cover(inst: Instance, lam: float, trace=None) -> CoverSolution:
    return CoverContext(inst).solve(lam, trace)


def verify_solution(inst: Instance, lam: float, sol: CoverSolution,
                    index: Optional[RootedIndex] = None) -> bool:
    """Every point has a center within lambda (plus 1e-9), by direct sums."""
    if index is None:
        index = RootedIndex(inst.tree, 0)
    for i in range(inst.n):
        if not any(expected_distance_naive(inst, index, c, i) <= lam + 1e-9
                   for c in sol.centers):
            return False
    return True


def solution_to_dict(inst: Instance, sol: CoverSolution) -> dict:
    from .instance import fmt_float
    return {
        "lambda": fmt_float(sol.lam),
        "centers": [point_to_json(inst.tree, c) for c in sol.centers],
        "covered_by": list(sol.covered_by),
    }


def to_dot(inst: Instance, centers: Sequence[TreePoint], medians: Sequence[int] = ()) -> str:
    """The tree with median vertices filled and centers drawn as extra nodes."""
    tree = inst.tree
    med = set(medians)
    at_vertex = {c.u for c in centers if c.is_vertex}
    lines = ["graph cover {", "  node [shape=circle, fontsize=10];"]
    for v in range(tree.vertex_count):
        attrs = [f'label="{v}"']
        if v in med:
            attrs.append("style=filled, fillcolor=lightblue")
        if v in at_vertex:
            attrs.append("shape=doublecircle, color=red")
        lines.append(f"  v{v} [{', '.join(attrs)}];")
    on_edge = {}
    for k, c in enumerate(centers):
        if not c.is_vertex:
            on_edge.setdefault((c.u, c.v), []).append((c.offset, k))
    for u, v, length in tree.edges:
        pts = sorted(on_edge.get((u, v), []))
        prev, prev_off = f"v{u}", 0.0
        for off, k in pts:
            name = f"c{k}"
            lines.append(f'  {name} [shape=point, color=red, xlabel="c{k}"];')
            lines.append(f'  {prev} -- {name} [label="{off - prev_off:.3g}"];')
            prev, prev_off = name, off
        lines.append(f'  {prev} -- v{v} [label="{length - prev_off:.3g}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
