"""Brute-force reference answers for every fast structure.

These work on an explicit subdivision of the tree (a vertex at every
location inside an edge) and a dense table of Ed values at its vertices,
so along any subdivided edge Ed is the straight line between its two
endpoint values.  Nothing here touches the decomposition or the fast
structures; only tree distances and the instance model are shared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .candidate_center import Infeasible
from .instance import Instance, cover_limit, expected_distance_naive
from .tree_core import RootedIndex, Tree, TreePoint


# ---------------------------------------------------------------------------
# subdivided tree with a dense Ed table


class _Dense:
    def __init__(self, inst: Instance):
        tree = inst.tree
        origin: List[TreePoint] = [TreePoint.vertex(v) for v in range(tree.vertex_count)]
        cuts: Dict[int, set] = {}
        for p in inst.points:
            for loc in p.locations:
                if not loc.point.is_vertex:
                    cuts.setdefault(tree.edge_id(loc.point.u, loc.point.v), set()).add(loc.point.offset)
        at: Dict[Tuple[int, float], int] = {}
        edges = []
        for eid, (u, v, length) in enumerate(tree.edges):
            prev, prev_off = u, 0.0
            for off in sorted(cuts.get(eid, ())):
                w = len(origin)
                origin.append(TreePoint(u, v, off))
                at[(eid, off)] = w
                edges.append((prev, w, off - prev_off))
                prev, prev_off = w, off
            edges.append((prev, v, length - prev_off))
        self.inst = inst
        self.origin = origin
        self.tree = Tree(len(origin), edges)
        t = self.tree.vertex_count
        n = inst.n
        prob = np.zeros((n, t))
        for i, p in enumerate(inst.points):
            for loc in p.locations:
                pt = loc.point
                x = pt.u if pt.is_vertex else at[(tree.edge_id(pt.u, pt.v), pt.offset)]
                prob[i, x] += loc.prob
        dist = np.zeros((t, t))
        adj = self.tree.adjacency
        for s in range(t):
            row = dist[s]
            stack = [(s, -1, 0.0)]
            while stack:
                x, px, d = stack.pop()
                row[x] = d
                for y, length, _ in adj[x]:
                    if y != px:
                        stack.append((y, x, d + length))
        self.dist = dist
        w = np.array([p.weight for p in inst.points])
        self.E = w[:, None] * (prob @ dist)

    def rooted(self, root: int):
        t = self.tree.vertex_count
        parent = [-1] * t
        plen = [0.0] * t
        depth = [0] * t
        order = [root]
        seen = [False] * t
        seen[root] = True
        k = 0
        while k < len(order):
            x = order[k]
            k += 1
            for y, length, _ in sorted(self.tree.adjacency[x]):
                if not seen[y]:
                    seen[y] = True
                    parent[y] = x
                    plen[y] = length
                    depth[y] = depth[x] + 1
                    order.append(y)
        return parent, plen, depth, order

    def to_original(self, a: int, b: int, delta: float) -> TreePoint:
        """Point delta from subdivision vertex a toward its neighbour b."""
        length = self.tree.edge_length(a, b)
        pa, pb = self.origin[a], self.origin[b]
        if delta <= 0.0:
            return pa
        if delta >= length:
            return pb
        tree = self.inst.tree
        if pa.is_vertex and pb.is_vertex:
            return TreePoint.on_edge(tree, pa.u, pb.u, delta)
        u, v = (pa.u, pa.v) if not pa.is_vertex else (pb.u, pb.v)

        def off(p: TreePoint) -> float:
            if p.is_vertex:
                return 0.0 if p.u == u else tree.edge_length(u, v)
            return p.offset

        oa, ob = off(pa), off(pb)
        return TreePoint.on_edge(tree, u, v, oa + delta if ob > oa else oa - delta)


# ---------------------------------------------------------------------------
# medians


def naive_median(inst: Instance, i: int, index: Optional[RootedIndex] = None) -> int:
    """Vertex minimising Ed(., P_i); smallest id on ties."""
    if index is None:
        index = RootedIndex(inst.tree, 0)
    best, best_val = -1, math.inf
    for v in range(inst.tree.vertex_count):
        val = expected_distance_naive(inst, index, TreePoint.vertex(v), i)
        if val < best_val:
            best, best_val = v, val
    return best


# ---------------------------------------------------------------------------
# greedy cover without any index structure


def _greedy(dense: _Dense, lam: float) -> List[Tuple[int, int, float]]:
    """Greedy centers as (lower vertex, parent, delta) on the subdivision."""
    E = dense.E
    n, t = E.shape
    limit = cover_limit(lam)
    medians = [int(np.argmin(E[i])) for i in range(n)]
    for i in range(n):
        if E[i, medians[i]] > limit:
            raise Infeasible(i, float(E[i, medians[i]]), lam)
    root = medians[0]
    parent, plen, depth, order = dense.rooted(root)
    # post-order with children in increasing id: reverse of a preorder that
    # pushes children in decreasing id
    kids: List[List[int]] = [[] for _ in range(t)]
    for v in order[1:]:
        kids[parent[v]].append(v)
    post: List[int] = []
    stack = [(root, False)]
    while stack:
        v, done = stack.pop()
        if done:
            post.append(v)
            continue
        stack.append((v, True))
        for c in sorted(kids[v], reverse=True):
            stack.append((c, False))
    below: List[List[int]] = [[] for _ in range(t)]
    for i, m in enumerate(medians):
        x = m
        while x != -1:
            below[x].append(i)
            x = parent[x]
    active = [True] * n
    centers: List[Tuple[int, int, float]] = []

    def cover_from(v: int, p: int, delta: float) -> None:
        centers.append((v, p, delta))
        for j in range(n):
            if not active[j]:
                continue
            if p < 0 or delta == 0.0:
                val = E[j, v]
            else:
                val = E[j, v] + (E[j, p] - E[j, v]) * (delta / plen[v])
            if val <= limit:
                active[j] = False

    for v in post:
        live = [i for i in below[v] if active[i]]
        if not live:
            continue
        if v == root:
            cover_from(root, -1, 0.0)
            continue
        best = None
        for i in live:
            u = v
            while parent[u] >= 0 and E[i, parent[u]] <= limit:
                u = parent[u]
            if parent[u] < 0:
                q = (u, 0.0)
            else:
                eu, ep = E[i, u], E[i, parent[u]]
                delta = 0.0 if eu >= lam else (lam - eu) / (ep - eu) * plen[u]
                q = (u, min(delta, float(np.nextafter(plen[u], 0.0))))
            key = (depth[q[0]], -q[1])
            if best is None or key > best[0]:
                best = (key, q)
        u, delta = best[1]
        if u == v:
            cover_from(v, parent[v], delta)
    return centers


def naive_greedy_cover(inst: Instance, lam: float) -> List[TreePoint]:
    """The bottom-up greedy on the median tree, by direct scans."""
    dense = _Dense(inst)
    out = []
    for v, p, delta in _greedy(dense, lam):
        out.append(dense.origin[v] if p < 0 else dense.to_original(v, p, delta))
    return out


# ---------------------------------------------------------------------------
# exhaustive optimum


def _candidate_masks(dense: _Dense, lam: float) -> List[int]:
    E = dense.E
    n, t = E.shape
    limit = cover_limit(lam)
    columns = [E[:, v] for v in range(t)]
    for a, b, length in dense.tree.edges:
        for i in range(n):
            ea, eb = E[i, a], E[i, b]
            if (ea - lam) * (eb - lam) < 0:
                s = (lam - ea) / (eb - ea)
                columns.append(E[:, a] + (E[:, b] - E[:, a]) * s)
    masks = set()
    for col in columns:
        m = 0
        for i in range(n):
            if col[i] <= limit:
                m |= 1 << i
        if m:
            masks.add(m)
    # drop masks contained in another
    ms = sorted(masks, key=lambda m: -bin(m).count("1"))
    kept: List[int] = []
    for m in ms:
        if not any(m | k == k for k in kept):
            kept.append(m)
    return kept


def exhaustive_cover_optimum(inst: Instance, lam: float, cap: int = 8) -> int:
    """Fewest candidate positions covering all points (breadth-first over unions)."""
    if inst.n > 8:
        raise ValueError("exhaustive optimum is limited to n <= 8")
    dense = _Dense(inst)
    full = (1 << inst.n) - 1
    masks = _candidate_masks(dense, lam)
    frontier = {0}
    seen = {0}
    for size in range(1, cap + 1):
        nxt = set()
        for s in frontier:
            for m in masks:
                u = s | m
                if u == full:
                    return size
                if u not in seen:
                    seen.add(u)
                    nxt.add(u)
        frontier = nxt
        if not frontier:
            break
    raise ValueError(f"no cover with at most {cap} centers")


# ---------------------------------------------------------------------------
# candidate centers (for checking the range structure)


def naive_candidate_center(inst: Instance, lam: float, index: RootedIndex,
                           medians: Sequence[int], indices: Sequence[int],
                           active: Sequence[bool]) -> Union[str, Tuple[int, float]]:
    """Candidate center of the active points among ``indices`` by path scans.

    ``inst`` must have every location on a vertex; ``index`` is rooted at the
    median-tree root.  Returns "UNCONSTRAINED", "INFEASIBLE" or (v, delta),
    the point delta above v toward its parent.
    """
    limit = cover_limit(lam)
    v = medians[indices[0]]
    for i in indices[1:]:
        v = index.lca(v, medians[i])
    best = None
    for i in indices:
        if not active[i]:
            continue
        ed = lambda x: expected_distance_naive(inst, index, TreePoint.vertex(x), i)
        u = medians[i]
        # climb while the parent still covers
        while index.parent[u] >= 0 and ed(index.parent[u]) <= limit:
            u = index.parent[u]
        if index.parent[u] < 0:
            q = (u, 0.0)
        else:
            eu, ep = ed(u), ed(index.parent[u])
            length = index.parent_length[u]
            delta = 0.0 if eu >= lam else (lam - eu) / (ep - eu) * length
            q = (u, min(delta, float(np.nextafter(length, 0.0))))
        if not index.is_ancestor(q[0], v):
            return "INFEASIBLE"
        key = (index.depth_hops[q[0]], -q[1])
        if best is None or key > best[0]:
            best = (key, q)
    return "UNCONSTRAINED" if best is None else best[1]


# ---------------------------------------------------------------------------
# k-center


def naive_candidate_values(inst: Instance) -> List[float]:
    """Median values and pairwise balance values, by walking explicit paths."""
    dense = _Dense(inst)
    E = dense.E
    n = inst.n
    medians = [int(np.argmin(E[i])) for i in range(n)]
    values = {float(E[i, medians[i]]) for i in range(n)}
    for i in range(n):
        parent, plen, depth, _ = dense.rooted(medians[i])
        for j in range(i + 1, n):
            mi, mj = medians[i], medians[j]
            if not (E[i, mi] <= E[j, mi] and E[j, mj] <= E[i, mj]):
                values.add(0.0)
                continue
            path = [mj]
            while path[-1] != mi:
                path.append(parent[path[-1]])
            path.reverse()  # mi -> mj
            g = [E[i, x] - E[j, x] for x in path]
            k = next(k for k in range(len(path)) if g[k] >= 0)
            if k == 0 or g[k] == 0:
                values.add(float(E[i, path[k]]))
                continue
            a, b = path[k - 1], path[k]
            s = -g[k - 1] / (g[k] - g[k - 1])
            values.add(float(E[i, a] + (E[i, b] - E[i, a]) * s))
    return sorted(values)


def naive_kcenter(inst: Instance, k: int) -> float:
    """Smallest candidate value whose greedy cover uses at most k centers."""
    dense = _Dense(inst)
    for lam in naive_candidate_values(inst):
        try:
            count = len(_greedy(dense, lam))
        except Infeasible:
            continue
        if count <= k:
            return lam
    raise AssertionError("no candidate value is feasible")


# ---------------------------------------------------------------------------
# reports


@dataclass
class Comparison:
    label: str
    structure: object
    oracle: object
    abs_dev: float
    rel_dev: float
    passed: bool


@dataclass
class OracleReport:
    suite: str
    tolerance: float
    items: List[Comparison] = field(default_factory=list)

    def add(self, label: str, structure, oracle, numeric: bool = True) -> bool:
        if numeric:
            a, b = float(structure), float(oracle)
            abs_dev = abs(a - b)
            rel_dev = abs_dev / max(abs(b), 1e-300) if abs_dev else 0.0
            ok = abs_dev <= self.tolerance * max(1.0, abs(b))
        else:
            abs_dev = rel_dev = 0.0 if structure == oracle else math.inf
            ok = structure == oracle
        self.items.append(Comparison(label, structure, oracle, abs_dev, rel_dev, ok))
        return ok

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.items)

    def summary(self) -> str:
        fails = [c for c in self.items if not c.passed]
        worst = max((c.rel_dev for c in self.items if math.isfinite(c.rel_dev)), default=0.0)
        lines = [f"suite {self.suite}: {len(self.items) - len(fails)}/{len(self.items)} passed, "
                 f"worst relative deviation {worst:.3g}"]
        for c in fails[:20]:
            lines.append(f"  FAIL {c.label}: structure={c.structure!r} oracle={c.oracle!r}")
        return "\n".join(lines)
