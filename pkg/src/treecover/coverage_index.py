"""Coverage-report queries with deletion.

For a decomposition node with two connectors y1, y2 and a point P_i with
no location in the node's piece, covering is a linear condition on the
query's coordinates (a, b): a is the distance from x to the y1-y2 path and
b the distance from that foot to y1.  Dividing by the positive coefficient
of a turns it into "the line b -> beta_i - s_i * b lies on or above a", so a
report is "every alive line above the query point".  Those are found in a
deletion-only envelope tree.  One-connector nodes reduce to a threshold on
d(x, y).
"""

from __future__ import annotations

import bisect
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .dist_oracle import A3, InfoLists
from .decomposition import VERTEX_LEAF
from .instance import Instance, cover_limit
from .tree_core import TreePoint

LEAF_SIZE = 8


class DeletionEnvelope:
    """Lines y = c + m * x with "report all alive lines on or above (x, y)".

    A segment tree over the lines in slope order; each tree node lazily
    caches the upper envelope of its alive lines.  Deleting only lowers
    the true maximum, so a stale envelope is an overestimate and pruning
    with it never loses an answer.  A node's cache is dropped once more
    than half of the lines it was built from have died.
    """

    def __init__(self, slopes: Sequence[float], intercepts: Sequence[float],
                 ids: Sequence[int]):
        order = sorted(range(len(slopes)), key=lambda k: (slopes[k], intercepts[k]))
        self.m = [float(slopes[k]) for k in order]
        self.c = [float(intercepts[k]) for k in order]
        self.ids = [ids[k] for k in order]
        self.pos = {ids[k]: p for p, k in enumerate(order)}
        t = len(order)
        self.alive = [True] * t
        self.alive_count = t
        # implicit tree: node -> (lo, hi, left, right)
        self.lo: List[int] = []
        self.hi: List[int] = []
        self.left: List[int] = []
        self.right: List[int] = []
        self.live: List[int] = []
        self.env: List[Optional[Tuple[List[float], List[int]]]] = []
        self.env_built_from: List[int] = []
        self.parent: List[int] = []
        self.leaf_node = [0] * t
        if t:
            self._build(0, t, -1)

    def _build(self, lo: int, hi: int, parent: int) -> int:
        stack = [(lo, hi, parent, -1, 0)]
        root = -1
        while stack:
            lo, hi, par, slot_owner, side = stack.pop()
            k = len(self.lo)
            self.lo.append(lo)
            self.hi.append(hi)
            self.left.append(-1)
            self.right.append(-1)
            self.live.append(hi - lo)
            self.env.append(None)
            self.env_built_from.append(0)
            self.parent.append(par)
            if slot_owner >= 0:
                if side == 0:
                    self.left[slot_owner] = k
                else:
                    self.right[slot_owner] = k
            else:
                root = k
            if hi - lo > LEAF_SIZE:
                mid = (lo + hi) // 2
                stack.append((mid, hi, k, k, 1))
                stack.append((lo, mid, k, k, 0))
            else:
                for p in range(lo, hi):
                    self.leaf_node[p] = k
        return root

    def _envelope(self, node: int) -> Tuple[List[float], List[int]]:
        env = self.env[node]
        if env is not None:
            return env
        m, c = self.m, self.c
        hull: List[int] = []
        for p in range(self.lo[node], self.hi[node]):
            if not self.alive[p]:
                continue
            if hull and m[hull[-1]] == m[p]:
                # equal slopes: sorted by intercept, so p dominates
                hull.pop()
            while len(hull) >= 2:
                a, b = hull[-2], hull[-1]
                # b is useless if p overtakes a no later than b does
                if (c[a] - c[p]) * (m[b] - m[a]) <= (c[a] - c[b]) * (m[p] - m[a]):
                    hull.pop()
                else:
                    break
            hull.append(p)
        breaks = []
        for a, b in zip(hull, hull[1:]):
            breaks.append((c[a] - c[b]) / (m[b] - m[a]))
        env = (breaks, hull)
        self.env[node] = env
        self.env_built_from[node] = self.live[node]
        return env

    def _max_at(self, node: int, x: float) -> float:
        breaks, hull = self._envelope(node)
        if not hull:
            return -np.inf
        k = bisect.bisect_left(breaks, x)
        best = -np.inf
        # neighbours guard against rounding in the breakpoints
        for j in (k - 1, k, k + 1):
            if 0 <= j < len(hull):
                p = hull[j]
                val = self.c[p] + self.m[p] * x
                if val > best:
                    best = val
        return best

    def report(self, x: float, y: float) -> List[int]:
        """Ids of alive lines with c + m * x >= y; they are deleted."""
        out: List[int] = []
        if self.alive_count == 0:
            return out
        slack = 1e-12 * (1.0 + abs(x) + abs(y))
        stack = [0]
        m, c, alive = self.m, self.c, self.alive
        while stack:
            node = stack.pop()
            if self.live[node] == 0:
                continue
            if self.left[node] < 0:
                for p in range(self.lo[node], self.hi[node]):
                    if alive[p] and c[p] + m[p] * x >= y:
                        out.append(p)
                continue
            if self._max_at(node, x) < y - slack:
                continue
            stack.append(self.right[node])
            stack.append(self.left[node])
        ids = [self.ids[p] for p in out]
        for p in out:
            self._kill(p)
        return ids

    def _kill(self, p: int) -> None:
        if not self.alive[p]:
            return
        self.alive[p] = False
        self.alive_count -= 1
        node = self.leaf_node[p]
        while node >= 0:
            self.live[node] -= 1
            if self.env[node] is not None and 2 * self.live[node] < self.env_built_from[node]:
                self.env[node] = None
            node = self.parent[node]

    def delete(self, line_id: int) -> None:
        p = self.pos.get(line_id)
        if p is not None:
            self._kill(p)


class ThresholdList:
    """Values beta sorted descending; report all alive with beta >= d."""

    def __init__(self, betas: Sequence[float], ids: Sequence[int]):
        order = sorted(range(len(betas)), key=lambda k: -betas[k])
        self.beta = [float(betas[k]) for k in order]
        self.ids = [ids[k] for k in order]
        self.pos = {ids[k]: p for p, k in enumerate(order)}
        # next[p]: union-find pointer to the first alive slot >= p
        self.next = list(range(len(order) + 1))

    def _find(self, p: int) -> int:
        root = p
        nxt = self.next
        while nxt[root] != root:
            root = nxt[root]
        while nxt[p] != root:
            nxt[p], p = root, nxt[p]
        return root

    def report(self, d: float) -> List[int]:
        out = []
        p = self._find(0)
        while p < len(self.beta) and self.beta[p] >= d:
            out.append(self.ids[p])
            self.next[p] = p + 1
            p = self._find(p + 1)
        return out

    def delete(self, line_id: int) -> None:
        p = self.pos.get(line_id)
        if p is not None and self._find(p) == p:
            self.next[p] = p + 1


class _NodeIndex:
    __slots__ = ("kind", "conns", "lines", "constant")

    def __init__(self, kind, conns, lines, constant):
        self.kind = kind
        self.conns = conns
        self.lines = lines
        # points whose Ed is constant over the piece: (i, value)
        self.constant = constant


class A1:
    def __init__(self, inst: Instance, a3: A3, lam: float):
        if lam < 0:
            raise ValueError("lambda must be non-negative")
        self.inst = inst
        self.a3 = a3
        self.lam = lam
        self.limit = cover_limit(lam)
        info: InfoLists = a3.info
        dt = a3.dt
        self.dt = dt
        self.index = a3.index
        n = inst.n
        w = [p.weight for p in inst.points]
        self.active = [True] * n
        self.zero_weight = [i for i in range(n) if w[i] == 0.0]
        self.node_lists: List[List[int]] = [[] for _ in range(n)]
        self.nodes: Dict[int, _NodeIndex] = {}
        limit = self.limit
        for nd in dt.nodes:
            nl = info.nodes[nd.id]
            if len(nl.out_idx) == 0 or not nd.connectors:
                continue
            conns = list(nd.connectors)
            ids, slopes, icpts, constant = [], [], [], []
            if len(conns) == 1:
                (y,) = conns
                for i, k in zip(nl.out_idx.tolist(), nl.out_pos.tolist()):
                    if w[i] == 0.0:
                        continue
                    A = w[i] * float(nl.F[y][k])
                    C = w[i] * float(nl.D[y][k])
                    self.node_lists[i].append(nd.id)
                    if A > 0:
                        ids.append(i)
                        slopes.append((limit - C) / A)
                    else:
                        constant.append((i, C))
                lines = ThresholdList(slopes, ids)
                self.nodes[nd.id] = _NodeIndex(1, conns, lines, constant)
                continue
            y1, y2 = conns
            d12 = self.index.vertex_dist(y1, y2)
            F1, F2, D1, D2 = nl.F[y1], nl.F[y2], nl.D[y1], nl.D[y2]
            for i, k in zip(nl.out_idx.tolist(), nl.out_pos.tolist()):
                if w[i] == 0.0:
                    continue
                f1, f2 = float(F1[k]), float(F2[k])
                A = w[i] * (f1 + f2)
                C = w[i] * (float(D1[k]) + float(D2[k]) + f2 * d12)
                self.node_lists[i].append(nd.id)
                if A > 0:
                    ids.append(i)
                    slopes.append(-(f1 - f2) / (f1 + f2))
                    icpts.append((limit - C) / A)
                else:
                    constant.append((i, C))
            lines = DeletionEnvelope(slopes, icpts, ids)
            self.nodes[nd.id] = _NodeIndex(2, conns, lines, constant)

    def alive_lines(self) -> int:
        total = 0
        for ni in self.nodes.values():
            if ni.kind == 2:
                total += ni.lines.alive_count
            else:
                total += sum(1 for p in range(len(ni.lines.beta)) if ni.lines._find(p) == p)
        return total

    def _report_node(self, ni: _NodeIndex, x: TreePoint) -> List[int]:
        out = [i for i, val in ni.constant if self.active[i] and val <= self.limit]
        if ni.kind == 1:
            d = self.index.point_to_vertex(x, ni.conns[0])
            out.extend(ni.lines.report(d))
            return out
        y1, y2 = ni.conns
        d1 = self.index.point_to_vertex(x, y1)
        d2 = self.index.point_to_vertex(x, y2)
        d12 = self.index.vertex_dist(y1, y2)
        a = max(0.0, 0.5 * (d1 + d2 - d12))
        b = d1 - a
        out.extend(ni.lines.report(b, a))
        return out

    def coverage_report(self, x: TreePoint) -> List[int]:
        """Active points covered by x; each is deactivated before returning."""
        found: List[int] = [i for i in self.zero_weight if self.active[i]]
        leaf = self.a3.leaf_of(x)
        for node in reversed(self.dt.path_to_root(leaf)):
            ni = self.nodes.get(node)
            if ni is not None:
                found.extend(self._report_node(ni, x))
        if self.dt.nodes[leaf].kind == VERTEX_LEAF:
            for i, val in self.a3.leaf_value.get(leaf, {}).items():
                if self.active[i] and val <= self.limit:
                    found.append(i)
        out = sorted(set(found))
        for i in out:
            self.deactivate(i)
        return out

    def deactivate(self, i: int) -> None:
        if not self.active[i]:
            return
        self.active[i] = False
        for node in self.node_lists[i]:
            self.nodes[node].lines.delete(i)


def build_a1(inst: Instance, a3: A3, lam: float) -> A1:
    return A1(inst, a3, lam)


def coverage_report(a1: A1, x: TreePoint) -> List[int]:
    return a1.coverage_report(x)


def deactivate(a1: A1, i: int) -> None:
    a1.deactivate(i)
