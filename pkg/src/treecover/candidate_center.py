"""Candidate-center queries over ranges of median ranks, with removals.

For point P_i, q_i is the point of the path from its median to the root
that is closest to the root while Ed(., P_i) <= lambda.  A segment tree
over median ranks keeps, for each range, the lowest q_i among its active
points, provided all of them lie on the path above the LCA of the range's
medians.  Points are stored as (v, delta): the point delta above vertex v
on the edge to its parent, which compares structurally without rounding.
"""

from __future__ import annotations

from typing import List, Optional, Tuple, Union

import numpy as np

from .dist_oracle import A3
from .instance import Instance, cover_limit
from .medians import MedianTree
from .tree_core import TreePoint


class Infeasible(Exception):
    """Some point cannot be covered at this lambda by any point of the tree."""

    def __init__(self, i: int, value: float, lam: float):
        super().__init__(f"INFEASIBLE({i}): Ed(p*,P_{i}) = {value!r} > lambda = {lam!r}")
        self.i = i
        self.value = value
        self.lam = lam


class _State:
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def __repr__(self) -> str:
        return self.name


# no active point constrains the range
UNCONSTRAINED = _State("UNCONSTRAINED")
# some active point cannot reach the range's LCA vertex
INFEASIBLE = _State("INFEASIBLE")

RootPoint = Tuple[int, float]
Answer = Union[RootPoint, _State]


class A2:
    def __init__(self, inst: Instance, mt: MedianTree, a3: A3, lam: float):
        self.inst = inst
        self.mt = mt
        self.a3 = a3
        self.lam = lam
        self.limit = cover_limit(lam)
        idx = mt.index
        self.index = idx
        n = inst.n
        self.n = n
        self.q: List[RootPoint] = []
        for r in range(n):
            self.q.append(self._farthest_feasible(mt.order[r]))
        size = 1
        while size < max(1, n):
            size *= 2
        self.size = size
        self.state: List[Answer] = [UNCONSTRAINED] * (2 * size)
        self.vert = [-1] * (2 * size)
        for r in range(n):
            self.state[size + r] = self.q[r]
            self.vert[size + r] = mt.medians[mt.order[r]]
        for k in range(size - 1, 0, -1):
            self.vert[k] = self._lca(self.vert[2 * k], self.vert[2 * k + 1])
            self._pull(k)
        self.removed = [False] * n

    # -- helpers -------------------------------------------------------------
    def _lca(self, a: int, b: int) -> int:
        if a < 0:
            return b
        if b < 0:
            return a
        return self.index.lca(a, b)

    def _ed(self, v: int, i: int) -> float:
        return self.a3.query(TreePoint.vertex(v), i)

    def _farthest_feasible(self, i: int) -> RootPoint:
        idx = self.index
        p = self.mt.medians[i]
        ep = self._ed(p, i)
        if ep > self.limit:
            raise Infeasible(i, ep, self.lam)
        lo, hi = 0, idx.depth_hops[p]
        if self._ed(idx.root, i) <= self.limit:
            return (idx.root, 0.0)
        # smallest depth whose ancestor is still feasible; depth lo is not
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self._ed(idx.level_ancestor(p, mid), i) <= self.limit:
                hi = mid
            else:
                lo = mid
        u = idx.level_ancestor(p, hi)
        eu = self._ed(u, i)
        ew = self._ed(idx.parent[u], i)
        length = idx.parent_length[u]
        if eu >= self.lam:
            return (u, 0.0)
        delta = (self.lam - eu) / (ew - eu) * length
        if delta >= length:
            delta = float(np.nextafter(length, 0.0))
        return (u, max(0.0, delta))

    def _lift(self, s: Answer, v: int) -> Answer:
        """Restrict a range answer to the path from v to the root."""
        if s is UNCONSTRAINED or s is INFEASIBLE:
            return s
        if self.index.is_ancestor(s[0], v):
            return s
        return INFEASIBLE

    def _lower(self, a: Answer, b: Answer) -> Answer:
        if a is INFEASIBLE or b is INFEASIBLE:
            return INFEASIBLE
        if a is UNCONSTRAINED:
            return b
        if b is UNCONSTRAINED:
            return a
        da = self.index.depth_hops[a[0]]
        db = self.index.depth_hops[b[0]]
        if da != db:
            return a if da > db else b
        return a if a[1] <= b[1] else b

    def _pull(self, k: int) -> None:
        v = self.vert[k]
        self.state[k] = self._lower(self._lift(self.state[2 * k], v),
                                    self._lift(self.state[2 * k + 1], v))

    # -- operations ----------------------------------------------------------
    def range_vertex(self, lo: int, hi: int) -> int:
        """LCA of the medians with ranks lo..hi."""
        v = -1
        a, b = lo + self.size, hi + self.size + 1
        while a < b:
            if a & 1:
                v = self._lca(v, self.vert[a])
                a += 1
            if b & 1:
                b -= 1
                v = self._lca(v, self.vert[b])
            a //= 2
            b //= 2
        return v

    def query(self, lo: int, hi: int) -> Answer:
        """Candidate center for the active points with ranks lo..hi."""
        if not (0 <= lo <= hi < self.n):
            raise IndexError(f"bad rank range [{lo}, {hi}]")
        v = self.range_vertex(lo, hi)
        out: Answer = UNCONSTRAINED
        a, b = lo + self.size, hi + self.size + 1
        while a < b:
            if a & 1:
                out = self._lower(out, self._lift(self.state[a], v))
                a += 1
            if b & 1:
                b -= 1
                out = self._lower(out, self._lift(self.state[b], v))
            a //= 2
            b //= 2
        return out

    def remove(self, rank: int) -> None:
        if self.removed[rank]:
            return
        self.removed[rank] = True
        k = rank + self.size
        self.state[k] = UNCONSTRAINED
        k //= 2
        while k >= 1:
            self._pull(k)
            k //= 2

    def to_tree_point(self, p: RootPoint) -> TreePoint:
        v, delta = p
        if delta == 0.0:
            return TreePoint.vertex(v)
        return TreePoint.on_edge(self.inst.tree, v, self.index.parent[v], delta)


def build_a2(inst: Instance, mt: MedianTree, a3: A3, lam: float) -> A2:
    return A2(inst, mt, a3, lam)


def candidate_query(a2: A2, lo: int, hi: int) -> Answer:
    return a2.query(lo, hi)


def remove(a2: A2, rank: int) -> None:
    a2.remove(rank)
