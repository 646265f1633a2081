"""Reduce a general instance to one where every location sits on a vertex and
every vertex holds a location, and map centers back to the original tree.

Three stages: split edges at interior locations (T1), prune empty leaves
(T2), splice out empty degree-2 vertices (T'), then give every remaining
empty vertex a zero-probability dummy location.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .instance import Instance, Location, UncertainPoint
from .tree_core import Tree, TreeError, TreePoint


@dataclass
class VCInstance:
    reduced: Instance
    original: Instance
    # reduced vertex -> the matching point of the original tree
    vertex_origin: List[TreePoint]
    # reduced edge id -> chain of T1 vertex ids from the smaller to the larger
    # reduced endpoint
    edge_paths: List[List[int]]
    # reduced vertex -> T1 vertex id
    t1_id: List[int]
    # T1 vertex -> original point; T1 edge (a, b) -> length
    t1_origin: List[TreePoint]
    t1_lengths: Dict[Tuple[int, int], float]
    # per point, per reduced location: True for zero-probability dummies
    dummy_markers: List[List[bool]]


def _split_edges(inst: Instance):
    """Stage one: a vertex for every distinct interior location offset."""
    tree = inst.tree
    t = tree.vertex_count
    origin: List[TreePoint] = [TreePoint.vertex(v) for v in range(t)]
    on_edge: Dict[int, List[float]] = {}
    for p in inst.points:
        for loc in p.locations:
            pt = loc.point
            if not pt.is_vertex:
                on_edge.setdefault(tree.edge_id(pt.u, pt.v), []).append(pt.offset)
    edges: List[Tuple[int, int, float]] = []
    split_vertex: Dict[Tuple[int, float], int] = {}
    for eid, (u, v, length) in enumerate(tree.edges):
        offs = sorted(set(on_edge.get(eid, ())))
        prev, prev_off = u, 0.0
        for off in offs:
            w = len(origin)
            origin.append(TreePoint(u, v, off))
            split_vertex[(eid, off)] = w
            edges.append((prev, w, off - prev_off))
            prev, prev_off = w, off
        edges.append((prev, v, length - prev_off))
    holder: List[List[int]] = []
    for p in inst.points:
        row = []
        for loc in p.locations:
            pt = loc.point
            if pt.is_vertex:
                row.append(pt.u)
            else:
                row.append(split_vertex[(tree.edge_id(pt.u, pt.v), pt.offset)])
        holder.append(row)
    return origin, edges, holder


def reduce(inst: Instance) -> VCInstance:
    origin, t1_edges, holder = _split_edges(inst)
    n1 = len(origin)
    adj: List[Dict[int, float]] = [dict() for _ in range(n1)]
    t1_lengths: Dict[Tuple[int, int], float] = {}
    for a, b, length in t1_edges:
        adj[a][b] = length
        adj[b][a] = length
        t1_lengths[(min(a, b), max(a, b))] = length
    occupied = [False] * n1
    for row in holder:
        for x in row:
            occupied[x] = True

    # stage two: remove empty leaves until none remain
    alive = [True] * n1
    deg = [len(a) for a in adj]
    queue = deque(x for x in range(n1) if deg[x] <= 1 and not occupied[x])
    remaining = n1
    while queue:
        x = queue.popleft()
        if not alive[x] or occupied[x] or deg[x] > 1 or remaining == 1:
            continue
        alive[x] = False
        remaining -= 1
        for y in adj[x]:
            if alive[y]:
                deg[y] -= 1
                if deg[y] <= 1 and not occupied[y]:
                    queue.append(y)

    # stage three: splice out empty degree-2 vertices, remembering the chains
    keep = [alive[x] and (occupied[x] or deg[x] != 2) for x in range(n1)]
    kept = [x for x in range(n1) if keep[x]]
    new_id = {x: k for k, x in enumerate(kept)}
    chains: Dict[Tuple[int, int], Tuple[float, List[int]]] = {}
    for x in kept:
        for y in adj[x]:
            if not alive[y]:
                continue
            chain = [x]
            total = adj[x][y]
            prev, cur = x, y
            while not keep[cur]:
                chain.append(cur)
                nxt = next(z for z in adj[cur] if alive[z] and z != prev)
                total += adj[cur][nxt]
                prev, cur = cur, nxt
            chain.append(cur)
            a, b = new_id[x], new_id[cur]
            if a < b:
                chains[(a, b)] = (total, chain)
    red_edges = sorted((a, b, total) for (a, b), (total, _) in chains.items())
    tree = Tree(len(kept), red_edges)
    edge_paths = [chains[(a, b)][1] for a, b, _ in tree.edges]

    # dummies on vertices still empty, handed out in blocks of m_i per point
    empty = [new_id[x] for x in kept if not occupied[x]]
    points: List[UncertainPoint] = []
    markers: List[List[bool]] = []
    cursor = 0
    for i, p in enumerate(inst.points):
        locs = [Location(TreePoint.vertex(new_id[holder[i][j]]), loc.prob)
                for j, loc in enumerate(p.locations)]
        mark = [False] * len(locs)
        take = min(p.m, len(empty) - cursor)
        for v in empty[cursor:cursor + take]:
            locs.append(Location(TreePoint.vertex(v), 0.0))
            mark.append(True)
        cursor += take
        points.append(UncertainPoint(p.weight, locs))
        markers.append(mark)
    if cursor != len(empty):  # cannot happen: |V3| <= M
        raise AssertionError("dummy assignment left empty vertices")
    return VCInstance(
        reduced=Instance(tree, points),
        original=inst,
        vertex_origin=[origin[x] for x in kept],
        edge_paths=edge_paths,
        t1_id=kept,
        t1_origin=origin,
        t1_lengths=t1_lengths,
        dummy_markers=markers,
    )


def _t1_point_to_original(vc: VCInstance, a: int, b: int, delta: float) -> TreePoint:
    """Point at distance delta from T1 vertex a along T1 edge (a, b)."""
    tree = vc.original.tree
    pa, pb = vc.t1_origin[a], vc.t1_origin[b]
    length = vc.t1_lengths[(min(a, b), max(a, b))]
    if delta <= 0:
        return pa
    if delta >= length:
        return pb
    # both ends lie on one original edge (u, v); find it and the offsets
    if pa.is_vertex and pb.is_vertex:
        u, v = pa.u, pb.u
        return TreePoint.on_edge(tree, u, v, delta)
    edge = (pa.u, pa.v) if not pa.is_vertex else (pb.u, pb.v)
    u, v = edge

    def off(p: TreePoint) -> float:
        if p.is_vertex:
            return 0.0 if p.u == u else tree.edge_length(u, v)
        return p.offset

    oa, ob = off(pa), off(pb)
    target = oa + delta if ob > oa else oa - delta
    return TreePoint.on_edge(tree, u, v, target)


def map_back(vc: VCInstance, centers: Sequence[TreePoint]) -> List[TreePoint]:
    """Translate centers on the reduced tree to the original tree."""
    out = []
    rtree = vc.reduced.tree
    for c in centers:
        if c.is_vertex:
            if not (0 <= c.u < rtree.vertex_count):
                raise TreeError(f"center {c!r} is not on the reduced tree")
            out.append(vc.vertex_origin[c.u])
            continue
        eid = rtree.edge_id(c.u, c.v)
        chain = vc.edge_paths[eid]
        delta = c.offset
        for a, b in zip(chain, chain[1:]):
            length = vc.t1_lengths[(min(a, b), max(a, b))]
            if delta <= length:
                out.append(_t1_point_to_original(vc, a, b, delta))
                break
            delta -= length
        else:
            out.append(vc.t1_origin[chain[-1]])
    return out


def vc_to_dict(vc: VCInstance) -> dict:
    from .instance import instance_to_dict, point_to_json

    otree = vc.original.tree
    return {
        "reduced": instance_to_dict(vc.reduced),
        "vertex_origin": [point_to_json(otree, p) for p in vc.vertex_origin],
        "dummy_markers": vc.dummy_markers,
    }


def split_instance(inst: Instance):
    """The instance on the tree with a vertex at every interior location.

    Returns (instance, locate) where ``locate`` maps a point of the original
    tree to the same point of the split tree.
    """
    origin, t1_edges, holder = _split_edges(inst)
    tree = Tree(len(origin), t1_edges)
    points = [UncertainPoint(p.weight, [Location(TreePoint.vertex(holder[i][j]), loc.prob)
                                        for j, loc in enumerate(p.locations)])
              for i, p in enumerate(inst.points)]
    otree = inst.tree
    # per original edge: sorted (offset, split vertex) including both ends
    marks: Dict[int, List[Tuple[float, int]]] = {}
    for w in range(otree.vertex_count, len(origin)):
        pt = origin[w]
        marks.setdefault(otree.edge_id(pt.u, pt.v), []).append((pt.offset, w))

    def locate(x: TreePoint) -> TreePoint:
        if x.is_vertex:
            return x
        eid = otree.edge_id(x.u, x.v)
        u, v, length = otree.edges[eid]
        stops = [(0.0, u)] + sorted(marks.get(eid, [])) + [(length, v)]
        for (oa, a), (ob, b) in zip(stops, stops[1:]):
            if x.offset <= ob:
                return TreePoint.on_edge(tree, a, b, x.offset - oa)
        return TreePoint.vertex(v)

    return Instance(tree, points), locate
