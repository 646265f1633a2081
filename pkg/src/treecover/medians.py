"""Medians of all uncertain points and the tree spanning them.

A vertex v is a median of P_i exactly when no component of T - v carries
more than half of P_i's probability.  Medians are located top-down over
the decomposition: at each node every cut vertex either is a median or
points to the component holding all of them, which narrows the search to
one child piece.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .decomposition import INTERNAL, VERTEX_LEAF, DecompTree
from .dist_oracle import InfoLists
from .instance import Instance
from .tree_core import RootedIndex

# masses within this of one half count as exactly one half
HALF_EPS = 1e-12


def _quotient_groups(dt: DecompTree, node: int, cut: int):
    """Components of T - cut seen from ``node``: lists of (children, worlds)."""
    nd = dt.nodes[node]
    kids = nd.children
    conns = [dt.nodes[c].connectors for c in kids]
    outer = list(nd.connectors)
    seen_kid = [False] * len(kids)
    seen_world = set()
    groups = []

    def expand(start_kid: Optional[int], start_world: Optional[int]):
        g_kids, g_worlds = [], []
        junctions = []
        if start_kid is not None:
            seen_kid[start_kid] = True
            g_kids.append(start_kid)
            junctions.extend(conns[start_kid])
        else:
            seen_world.add(start_world)
            g_worlds.append(start_world)
            junctions.append(start_world)
        seen_j = set()
        while junctions:
            j = junctions.pop()
            if j == cut or j in seen_j:
                continue
            seen_j.add(j)
            if j in outer and j not in seen_world:
                seen_world.add(j)
                g_worlds.append(j)
            for ci in range(len(kids)):
                if not seen_kid[ci] and j in conns[ci]:
                    seen_kid[ci] = True
                    g_kids.append(ci)
                    junctions.extend(conns[ci])
        return g_kids, g_worlds

    for ci in range(len(kids)):
        if not seen_kid[ci]:
            groups.append(expand(ci, None))
    for z in outer:
        # a world hanging at the cut vertex itself is its own component
        if z not in seen_world:
            groups.append(expand(None, z))
    return groups


def compute_medians(inst: Instance, dt: DecompTree, info: InfoLists) -> List[int]:
    """A median vertex for every uncertain point."""
    n = inst.n
    medians = [-1] * n
    at_vertex: List[Dict[int, float]] = [dict() for _ in range(inst.tree.vertex_count)]
    for i, p in enumerate(inst.points):
        for loc in p.locations:
            d = at_vertex[loc.point.u]
            d[i] = d.get(i, 0.0) + loc.prob
    leaf_rank = [0] * inst.tree.vertex_count
    for k, v in enumerate(dt.leaf_order):
        leaf_rank[v] = k

    pending: Dict[int, List[int]] = {dt.root: list(range(n))}
    stack = [dt.root]
    while stack:
        node = stack.pop()
        todo = pending.pop(node, [])
        if not todo:
            continue
        nd = dt.nodes[node]
        if nd.kind == VERTEX_LEAF:
            for i in todo:
                medians[i] = nd.leaf_vertex
            continue
        if nd.kind != INTERNAL:
            raise AssertionError("a median search reached an open edge")
        nl = info.nodes[node]
        inside_pos = np.nonzero(nl.inside)[0]
        inside_idx = nl.idx[inside_pos]
        kids = nd.children
        cuts = []
        for v in nd.cut_vertices:
            # child holding v as a closed vertex (none when v is open here)
            owner = next((ci for ci, c in enumerate(kids)
                          if dt.nodes[c].leaf_lo <= leaf_rank[v] < dt.nodes[c].leaf_hi), -1)
            cuts.append((v, owner, _quotient_groups(dt, node, v)))
        forward: Dict[int, List[int]] = {}
        for i in todo:
            k = int(np.searchsorted(inside_idx, i))
            kpos = int(inside_pos[k])
            cand = set(range(len(kids)))
            answer = -1
            for v, owner, groups in cuts:
                best_g, best_mass = None, -1.0
                for g_kids, g_worlds in groups:
                    mass = sum(float(nl.child_mass[ci][k]) for ci in g_kids)
                    mass += sum(float(nl.F[z][kpos]) for z in g_worlds)
                    if owner in g_kids:
                        mass -= at_vertex[v].get(i, 0.0)
                    if mass > best_mass:
                        best_g, best_mass = g_kids, mass
                if best_mass > 0.5 + HALF_EPS:
                    cand &= set(best_g)
                else:
                    answer = v
                    break
            if answer < 0:
                live = [ci for ci in sorted(cand)
                        if dt.nodes[kids[ci]].leaf_hi > dt.nodes[kids[ci]].leaf_lo]
                if len(live) != 1:
                    # only reachable through rounding right at one half
                    answer = cuts[-1][0]
                else:
                    child = kids[live[0]]
                    if dt.nodes[child].kind == VERTEX_LEAF:
                        answer = dt.nodes[child].leaf_vertex
                    else:
                        forward.setdefault(child, []).append(i)
                        continue
            medians[i] = answer
        for child, lst in forward.items():
            pending[child] = lst
            stack.append(child)
    return medians


def exhaustive_probability_check(inst: Instance, i: int, v: int) -> Tuple[str, int]:
    """Where the medians of P_i lie relative to vertex v, by direct sums.

    Returns ("side", y) when the component of T - v through neighbour y
    carries more than half the probability, else ("at", v).
    """
    tree = inst.tree
    mass_at = [0.0] * tree.vertex_count
    for loc in inst.points[i].locations:
        if not loc.point.is_vertex:
            raise ValueError("exhaustive check expects vertex locations")
        mass_at[loc.point.u] += loc.prob
    for y, _, _ in sorted(tree.adjacency[v]):
        total = 0.0
        stack = [(y, v)]
        while stack:
            a, pa = stack.pop()
            total += mass_at[a]
            for b, _, _ in tree.adjacency[a]:
                if b != pa:
                    stack.append((b, a))
        if total > 0.5 + HALF_EPS:
            return ("side", y)
    return ("at", v)


@dataclass
class MedianTree:
    medians: List[int]
    root: int
    index: RootedIndex
    in_tm: List[bool]
    # children of each vertex inside T_m, increasing id
    tm_children: List[List[int]]
    # order[r] is the original point with rank r; rank[i] the inverse
    order: List[int]
    rank: List[int]
    # rank range [lo, hi] of the medians inside T_m(v); -1 outside T_m
    range_lo: List[int]
    range_hi: List[int]
    # first leaf reached by always descending to the leftmost child
    start_leaf: int

    def points_at(self, v: int) -> List[int]:
        return [i for i in self.order if self.medians[i] == v]


def build_median_tree(inst: Instance, medians: Sequence[int],
                      index: Optional[RootedIndex] = None) -> MedianTree:
    """Root at the median of point 0, prune to T_m, rank medians post-order."""
    root = medians[0]
    if index is None or index.root != root:
        index = RootedIndex(inst.tree, root)
    t = inst.tree.vertex_count
    holders: List[List[int]] = [[] for _ in range(t)]
    for i, v in enumerate(medians):
        holders[v].append(i)
    in_tm = [False] * t
    for v in reversed(index.preorder):
        if holders[v] or any(in_tm[c] for c in index.children[v]):
            in_tm[v] = True
    tm_children = [[c for c in index.children[v] if in_tm[c]] if in_tm[v] else []
                   for v in range(t)]
    order: List[int] = []
    lo = [-1] * t
    hi = [-1] * t
    # iterative post-order; the root's own medians get the last ranks
    stack = [(root, 0)]
    while stack:
        v, it = stack.pop()
        if it == 0:
            lo[v] = len(order)
        kids = tm_children[v]
        if it < len(kids):
            stack.append((v, it + 1))
            stack.append((kids[it], 0))
            continue
        own = holders[v]
        if v == root:
            own = [i for i in own if i != 0] + [0]
        order.extend(own)
        hi[v] = len(order) - 1
    rank = [0] * len(order)
    for r, i in enumerate(order):
        rank[i] = r
    leaf = root
    while tm_children[leaf]:
        leaf = tm_children[leaf][0]
    return MedianTree(list(medians), root, index, in_tm, tm_children, order, rank, lo, hi, leaf)
