"""Expected-distance queries through the decomposition tree.

For every decomposition node the information lists record, per point
listed there and per connector y, the probability mass F of the point
outside the node's piece through y and the distance mass D (sum of f * d(p, y)
over that mass).  A point with no location in a piece sees the piece only
through its connectors, so Ed(x, P_i) for x in the piece is a plane in
two coordinates of x; the query walks down to the first node where i has
no location and evaluates that plane.

D is stored without the weight w_i, which is applied once at query time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .decomposition import EDGE_LEAF, INTERNAL, VERTEX_LEAF, DecompTree, side_items
from .instance import Instance
from .tree_core import RootedIndex, TreeError, TreePoint


@dataclass
class NodeLists:
    # indices listed at the node: every point with a location in the parent's
    # piece (all points at the root), sorted
    idx: np.ndarray
    # True where the point also has a location inside this node's piece
    inside: np.ndarray
    # connector -> arrays aligned with idx
    F: Dict[int, np.ndarray] = field(default_factory=dict)
    D: Dict[int, np.ndarray] = field(default_factory=dict)
    # the part of idx with no location inside (the list L of the node)
    out_idx: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    out_pos: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    # internal nodes: per child, probability mass inside that child's piece
    # for every point with a location in this node's piece
    child_mass: List[np.ndarray] = field(default_factory=list)


@dataclass
class InfoLists:
    dt: DecompTree
    index: RootedIndex
    nodes: List[NodeLists]
    # locations laid out in decomposition leaf order
    loc_vertex: np.ndarray
    loc_point: np.ndarray
    loc_prob: np.ndarray
    # loc_start[k]..loc_start[k+1] are the locations at the k-th vertex leaf
    loc_start: np.ndarray

    def slice_of(self, node: int) -> Tuple[int, int]:
        nd = self.dt.nodes[node]
        return int(self.loc_start[nd.leaf_lo]), int(self.loc_start[nd.leaf_hi])

    def inside_indices(self, node: int) -> np.ndarray:
        nl = self.nodes[node]
        return nl.idx[nl.inside]

    def lookup(self, node: int, i: int, y: int) -> Tuple[float, float]:
        """(F, D) of point i at connector y of ``node``."""
        nl = self.nodes[node]
        k = int(np.searchsorted(nl.idx, i))
        if k >= len(nl.idx) or nl.idx[k] != i:
            raise KeyError(f"point {i} is not listed at node {node}")
        return float(nl.F[y][k]), float(nl.D[y][k])


def build_info_lists(inst: Instance, dt: DecompTree, index: RootedIndex) -> InfoLists:
    """Top-down pass filling F and D for every node and connector."""
    n = inst.n
    order = dt.leaf_order
    leaf_rank = [0] * inst.tree.vertex_count
    for k, v in enumerate(order):
        leaf_rank[v] = k
    per_vertex: List[List[Tuple[int, float]]] = [[] for _ in range(inst.tree.vertex_count)]
    for i, p in enumerate(inst.points):
        for loc in p.locations:
            if not loc.point.is_vertex:
                raise TreeError("information lists need every location on a vertex")
            per_vertex[loc.point.u].append((i, loc.prob))
    lv, lp, lf = [], [], []
    start = [0]
    for v in order:
        for i, f in per_vertex[v]:
            lv.append(v)
            lp.append(i)
            lf.append(f)
        start.append(len(lv))
    loc_vertex = np.asarray(lv, dtype=np.int64)
    loc_point = np.asarray(lp, dtype=np.int64)
    loc_prob = np.asarray(lf, dtype=np.float64)
    loc_start = np.asarray(start, dtype=np.int64)

    nodes_dt = dt.nodes
    lists: List[Optional[NodeLists]] = [None] * len(nodes_dt)
    all_idx = np.arange(n, dtype=np.int64)
    lists[dt.root] = NodeLists(all_idx, np.ones(n, dtype=bool))
    posmap = np.full(n, -1, dtype=np.int64)

    def sl(node: int) -> slice:
        nd = nodes_dt[node]
        return slice(int(loc_start[nd.leaf_lo]), int(loc_start[nd.leaf_hi]))

    stack = [dt.root]
    while stack:
        pid = stack.pop()
        pnode = nodes_dt[pid]
        plist = lists[pid]
        if pnode.kind != INTERNAL:
            continue
        pos = np.nonzero(plist.inside)[0]
        I = plist.idx[pos]
        k = len(I)
        posmap[I] = np.arange(k)
        kids = pnode.children
        kid_pos = [posmap[loc_point[sl(c)]] for c in kids]
        kid_prob = [loc_prob[sl(c)] for c in kids]
        kid_vert = [loc_vertex[sl(c)] for c in kids]
        masses = [np.bincount(kp, weights=kf, minlength=k) for kp, kf in zip(kid_pos, kid_prob)]
        plist.child_mass = masses
        world_F = {z: plist.F[z][pos] for z in pnode.connectors}
        world_D = {z: plist.D[z][pos] for z in pnode.connectors}
        for ci, c in enumerate(kids):
            cnode = nodes_dt[c]
            inside = np.bincount(kid_pos[ci], minlength=k) > 0
            nl = NodeLists(I, inside)
            for y in cnode.connectors:
                sibs, worlds = side_items(dt, pid, c, y)
                F = np.zeros(k)
                D = np.zeros(k)
                for s in sibs:
                    si = kids.index(s)
                    if len(kid_pos[si]) == 0:
                        continue
                    F += masses[si]
                    d = index.vertex_dist_many(kid_vert[si], y)
                    D += np.bincount(kid_pos[si], weights=kid_prob[si] * d, minlength=k)
                for z in worlds:
                    F += world_F[z]
                    D += world_D[z] + world_F[z] * index.vertex_dist(z, y)
                nl.F[y] = F
                nl.D[y] = D
            nl.out_pos = np.nonzero(~inside)[0]
            nl.out_idx = I[nl.out_pos]
            lists[c] = nl
            stack.append(c)
        posmap[I] = -1
    return InfoLists(dt, index, lists, loc_vertex, loc_point, loc_prob, loc_start)


# ---------------------------------------------------------------------------
# the query structure


@dataclass
class EdgeLinearForm:
    """Ed(x, P_i) = intercept + slope * s for x at distance s from ``u``."""
    u: int
    v: int
    slope: float
    intercept: float

    def at(self, s: float) -> float:
        return self.intercept + self.slope * s


class A3:
    def __init__(self, inst: Instance, info: InfoLists):
        self.inst = inst
        self.info = info
        self.dt = info.dt
        self.index = info.index
        self.weights = [p.weight for p in inst.points]
        # Ed(v, P_i) at a vertex leaf for the points holding a location at v
        self.leaf_value: Dict[int, Dict[int, float]] = {}
        for nd in self.dt.nodes:
            if nd.kind != VERTEX_LEAF:
                continue
            nl = info.nodes[nd.id]
            vals = {}
            for k in np.nonzero(nl.inside)[0]:
                i = int(nl.idx[k])
                s = sum(float(nl.D[y][k]) for y in nd.connectors)
                vals[i] = self.weights[i] * s
            self.leaf_value[nd.id] = vals

    def leaf_of(self, x: TreePoint) -> int:
        if x.is_vertex:
            return self.dt.leaf_of_vertex[x.u]
        return self.dt.leaf_of_edge[self.inst.tree.edge_id(x.u, x.v)]

    def _plane(self, node: int, k: int, x: TreePoint, i: int) -> float:
        nd = self.dt.nodes[node]
        nl = self.info.nodes[node]
        conns = nd.connectors
        w = self.weights[i]
        if len(conns) == 1:
            (y,) = conns
            return w * (float(nl.F[y][k]) * self.index.point_to_vertex(x, y) + float(nl.D[y][k]))
        y1, y2 = conns
        d1 = self.index.point_to_vertex(x, y1)
        d2 = self.index.point_to_vertex(x, y2)
        d12 = self.index.vertex_dist(y1, y2)
        # a: distance from x to the y1-y2 path, b: from there to y1
        a = max(0.0, 0.5 * (d1 + d2 - d12))
        b = d1 - a
        f1, f2 = float(nl.F[y1][k]), float(nl.F[y2][k])
        return w * (a * (f1 + f2) + (f1 - f2) * b
                    + float(nl.D[y1][k]) + float(nl.D[y2][k]) + f2 * d12)

    def query(self, x: TreePoint, i: int) -> float:
        if not (0 <= i < self.inst.n):
            raise IndexError(f"uncertain point index {i} out of range")
        leaf = self.leaf_of(x)
        path = self.dt.path_to_root(leaf)
        for node in reversed(path):
            nl = self.info.nodes[node]
            out = nl.out_idx
            if len(out) == 0:
                continue
            k = int(np.searchsorted(out, i))
            if k < len(out) and out[k] == i:
                return self._plane(node, int(nl.out_pos[k]), x, i)
        # x is a vertex holding a location of P_i
        vals = self.leaf_value.get(leaf, {})
        if i in vals:
            return vals[i]
        raise AssertionError(f"point {i} not found on the descent to {x!r}")

    def edge_linear_form(self, u: int, v: int, i: int) -> EdgeLinearForm:
        tree = self.inst.tree
        length = tree.edge_length(u, v)
        eu = self.query(TreePoint.vertex(u), i)
        ev = self.query(TreePoint.vertex(v), i)
        return EdgeLinearForm(u, v, (ev - eu) / length, eu)


def build_a3(inst: Instance, dt: DecompTree, index: Optional[RootedIndex] = None,
             info: Optional[InfoLists] = None) -> A3:
    if index is None:
        index = RootedIndex(inst.tree, 0)
    if info is None:
        info = build_info_lists(inst, dt, index)
    return A3(inst, info)


def query_ed(a3: A3, x: TreePoint, i: int) -> float:
    return a3.query(x, i)


def edge_linear_form(a3: A3, u: int, v: int, i: int) -> EdgeLinearForm:
    return a3.edge_linear_form(u, v, i)
