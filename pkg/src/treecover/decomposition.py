"""Connector-bounded centroid decomposition of a vertex-constrained tree.

Every node of the decomposition tree owns a connected piece of the input
tree with at most two connectors, i.e. boundary vertices through which the
piece touches the rest of the tree.  A piece is split at a weighted
centroid; when one side ends up with three connectors it is split again at
the middle connector (connectors on a path) or at the branching vertex
joining them.  Leaves are single closed vertices or single open edges.

Sizes count uncertain-point locations (not vertices), so vertices holding
several locations are handled uniformly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .instance import Instance
from .tree_core import RootedIndex, Tree

INTERNAL, VERTEX_LEAF, EDGE_LEAF = "internal", "vertex", "edge"


@dataclass
class DecompNode:
    id: int
    parent: int
    depth: int
    kind: str
    connectors: List[int]
    size: int
    children: List[int] = field(default_factory=list)
    centroid: int = -1
    # vertices where this node's piece was cut: the centroid and, after a
    # connector-reducing step, the second cut vertex
    cut_vertices: List[int] = field(default_factory=list)
    leaf_vertex: int = -1
    leaf_edge: Tuple[int, int] = (-1, -1)
    # range of this node's vertex leaves in DFS leaf order
    leaf_lo: int = 0
    leaf_hi: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.kind != INTERNAL


@dataclass
class DecompTree:
    tree: Tree
    nodes: List[DecompNode]
    root: int
    leaf_of_vertex: List[int]
    leaf_of_edge: List[int]
    # vertex leaves in DFS order; leaf_order[k] is the vertex of the k-th one
    leaf_order: List[int]
    location_count: List[int]

    @property
    def height(self) -> int:
        return max(nd.depth for nd in self.nodes)

    def closed_vertices(self, node: int) -> List[int]:
        nd = self.nodes[node]
        return self.leaf_order[nd.leaf_lo:nd.leaf_hi]

    def path_to_root(self, node: int) -> List[int]:
        out = []
        while node >= 0:
            out.append(node)
            node = self.nodes[node].parent
        return out


class _Piece:
    __slots__ = ("edges", "closed", "verts")

    def __init__(self, edges: List[int], closed: Set[int], verts: Optional[Set[int]] = None):
        self.edges = edges
        self.closed = closed
        # every vertex the piece touches, open or closed
        self.verts = verts if verts is not None else set(closed)


def _local_adjacency(tree: Tree, edges: Iterable[int]) -> Dict[int, List[Tuple[int, int]]]:
    ladj: Dict[int, List[Tuple[int, int]]] = {}
    tedges = tree.edges
    for eid in edges:
        u, v, _ = tedges[eid]
        ladj.setdefault(u, []).append((v, eid))
        ladj.setdefault(v, []).append((u, eid))
    return ladj


def _touched(tree: Tree, piece: _Piece) -> Set[int]:
    s = set(piece.closed)
    tedges = tree.edges
    for eid in piece.edges:
        s.add(tedges[eid][0])
        s.add(tedges[eid][1])
    return s


def piece_connectors(tree: Tree, edges: Sequence[int], closed: Set[int]) -> List[int]:
    """Open vertices of the piece plus closed ones with an outside edge."""
    ladj = _local_adjacency(tree, edges)
    out = []
    for x in set(ladj) | set(closed):
        if x not in closed:
            out.append(x)
        elif len(ladj.get(x, ())) < tree.degree(x):
            out.append(x)
    return sorted(out)


def find_centroid(tree: Tree, edges: Sequence[int], closed: Set[int],
                  weight: Sequence[int]) -> int:
    """Vertex of the piece (with local degree >= 2) minimising the heaviest
    component left after removing it; smallest id on ties.

    ``weight[v]`` is the number of locations at v; only closed vertices
    count toward component sizes.
    """
    if len(edges) < 2:
        raise ValueError("a piece needs at least two edges to have a centroid")
    ladj = _local_adjacency(tree, edges)
    return _centroid(ladj, closed, weight)


def _centroid(ladj: Dict[int, List[Tuple[int, int]]], closed: Set[int],
              weight: Sequence[int]) -> int:
    start = min(ladj)
    order = [start]
    parent = {start: -1}
    k = 0
    while k < len(order):
        x = order[k]
        k += 1
        for y, _ in ladj[x]:
            if y != parent[x]:
                parent[y] = x
                order.append(y)
    sub = {}
    for x in reversed(order):
        s = weight[x] if x in closed else 0
        for y, _ in ladj[x]:
            if y != parent[x]:
                s += sub[y]
        sub[x] = s
    total = sub[start]
    best, best_key = -1, None
    for x in order:
        if len(ladj[x]) < 2:
            continue
        heaviest = total - sub[x]
        for y, _ in ladj[x]:
            if y != parent[x] and sub[y] > heaviest:
                heaviest = sub[y]
        key = (heaviest, x)
        if best_key is None or key < best_key:
            best, best_key = x, key
    return best


def _components_at(ladj: Dict[int, List[Tuple[int, int]]], x: int):
    """For each neighbour y of x: (y, edge(x,y), vertices, edges) of the part
    of the piece reached from x through y."""
    comps = []
    for y, eid in sorted(ladj[x]):
        verts = [y]
        cedges = [eid]
        stack = [(y, x)]
        while stack:
            a, pa = stack.pop()
            for b, e in ladj[a]:
                if b != pa:
                    verts.append(b)
                    cedges.append(e)
                    stack.append((b, a))
        comps.append((y, eid, verts, cedges))
    return comps


def _weight_of(verts: Iterable[int], closed: Set[int], weight: Sequence[int]) -> int:
    return sum(weight[v] for v in verts if v in closed)


def _split_into_groups(comps, closed: Set[int], weight: Sequence[int], x: int,
                       anchors: Optional[List[List[int]]] = None) -> List[_Piece]:
    """Distribute components around cut vertex x into pieces.

    Without ``anchors``: two groups balanced greedily (largest component
    first onto the lighter side).  With ``anchors`` (one list of comp
    indices per group): those comps are fixed and the rest go to the
    lightest group.  x itself, when closed, joins the lightest group.
    """
    cw = [_weight_of(c[2], closed, weight) for c in comps]
    if anchors is None:
        groups: List[List[int]] = [[], []]
        gw = [0, 0]
        order = sorted(range(len(comps)), key=lambda k: (-cw[k], comps[k][0]))
        for k in order:
            g = 0 if gw[0] <= gw[1] else 1
            if not groups[1 - g] and groups[g]:
                g = 1 - g
            groups[g].append(k)
            gw[g] += cw[k]
    else:
        groups = [list(a) for a in anchors]
        gw = [sum(cw[k] for k in a) for a in anchors]
        fixed = {k for a in anchors for k in a}
        for k in sorted(range(len(comps)), key=lambda k: (-cw[k], comps[k][0])):
            if k in fixed:
                continue
            g = min(range(len(groups)), key=lambda j: (gw[j], j))
            groups[g].append(k)
            gw[g] += cw[k]
    host = -1
    if x in closed:
        host = min(range(len(groups)), key=lambda j: (gw[j], j))
    pieces = []
    for g, members in enumerate(groups):
        edges: List[int] = []
        pclosed: Set[int] = set()
        pverts: Set[int] = {x}
        for k in members:
            _, eid, verts, cedges = comps[k]
            edges.extend(cedges)
            pverts.update(verts)
            pclosed.update(v for v in verts if v in closed)
        if g == host:
            pclosed.add(x)
        pieces.append(_Piece(edges, pclosed, pverts))
    return pieces


def _tree_median(index: RootedIndex, a: int, b: int, c: int) -> int:
    return index.lca(a, b) ^ index.lca(a, c) ^ index.lca(b, c)


def decompose(inst: Instance, index: Optional[RootedIndex] = None) -> DecompTree:
    """Build the decomposition of ``inst.tree``; sizes from its locations."""
    tree = inst.tree
    t = tree.vertex_count
    if index is None:
        index = RootedIndex(tree, 0)
    weight = [0] * t
    for p in inst.points:
        for loc in p.locations:
            weight[loc.point.u] += 1

    nodes: List[DecompNode] = []
    leaf_of_vertex = [-1] * t
    leaf_of_edge = [-1] * max(0, t - 1)

    def new_node(parent: int, depth: int, piece: _Piece, conns: List[int]) -> int:
        size = sum(weight[v] for v in piece.closed)
        nd = DecompNode(len(nodes), parent, depth, INTERNAL, conns, size)
        nodes.append(nd)
        return nd.id

    root_piece = _Piece(list(range(t - 1)), set(range(t)))
    work = [(new_node(-1, 0, root_piece, []), root_piece)]
    while work:
        nid, piece = work.pop()
        nd = nodes[nid]
        if not piece.edges:
            (v,) = piece.closed
            nd.kind = VERTEX_LEAF
            nd.leaf_vertex = v
            leaf_of_vertex[v] = nid
            continue
        if len(piece.edges) == 1:
            eid = piece.edges[0]
            u, v, _ = tree.edges[eid]
            if not piece.closed:
                nd.kind = EDGE_LEAF
                nd.leaf_edge = (u, v)
                leaf_of_edge[eid] = nid
                continue
            subs = []
            if u in piece.closed:
                subs.append((_Piece([], {u}), [u]))
            subs.append((_Piece([eid], set(), {u, v}), [u, v]))
            if v in piece.closed:
                subs.append((_Piece([], {v}), [v]))
            # closed endpoints act as the cut points of a terminal piece
            nd.cut_vertices = [w for w in (u, v) if w in piece.closed]
            for sp, conns in subs:
                cid = new_node(nid, nd.depth + 1, sp, conns)
                nd.children.append(cid)
                work.append((cid, sp))
            continue

        ladj = _local_adjacency(tree, piece.edges)
        x = _centroid(ladj, piece.closed, weight)
        nd.centroid = x
        nd.cut_vertices = [x]
        comps = _components_at(ladj, x)
        halves = _split_into_groups(comps, piece.closed, weight, x)
        # a piece's connectors are its cut vertex plus inherited connectors
        outer = set(nd.connectors)
        final: List[Tuple[_Piece, List[int]]] = []
        for half in halves:
            conns = sorted((outer & half.verts) | {x})
            if len(conns) <= 2:
                final.append((half, conns))
                continue
            a, b, c = conns
            m = _tree_median(index, a, b, c)
            nd.cut_vertices.append(m)
            hadj = _local_adjacency(tree, half.edges)
            hcomps = _components_at(hadj, m)
            anchors = []
            for y in conns:
                if y == m:
                    continue
                for k, comp in enumerate(hcomps):
                    if y in comp[2]:
                        anchors.append([k])
                        break
            hconns = set(conns)
            for sp in _split_into_groups(hcomps, half.closed, weight, m, anchors):
                final.append((sp, sorted((hconns & sp.verts) | {m})))
        for sp, conns in final:
            cid = new_node(nid, nd.depth + 1, sp, conns)
            nd.children.append(cid)
            work.append((cid, sp))

    # DFS leaf order so each node's closed vertices form a contiguous range
    leaf_order: List[int] = []
    stack = [(0, False)]
    while stack:
        nid, done = stack.pop()
        nd = nodes[nid]
        if done:
            nd.leaf_hi = len(leaf_order)
            continue
        nd.leaf_lo = len(leaf_order)
        if nd.kind == VERTEX_LEAF:
            leaf_order.append(nd.leaf_vertex)
            nd.leaf_hi = len(leaf_order)
            continue
        stack.append((nid, True))
        for cid in reversed(nd.children):
            stack.append((cid, False))
    return DecompTree(tree, nodes, 0, leaf_of_vertex, leaf_of_edge, leaf_order, weight)


# ---------------------------------------------------------------------------
# outside worlds


def side_items(dt: DecompTree, parent: int, child: int, y: int) -> Tuple[List[int], List[int]]:
    """Pieces reachable from connector y of ``child`` without entering it.

    Returns (sibling node ids, connectors z of ``parent`` whose outside
    world T(z, parent) is reached).
    """
    pnode = dt.nodes[parent]
    outer = set(pnode.connectors)
    siblings: List[int] = []
    worlds: List[int] = []
    seen_j = {y}
    seen_c = {child}
    queue = [y]
    while queue:
        j = queue.pop()
        if j in outer and j not in worlds:
            worlds.append(j)
        for c in pnode.children:
            if c in seen_c or j not in dt.nodes[c].connectors:
                continue
            seen_c.add(c)
            siblings.append(c)
            for z in dt.nodes[c].connectors:
                if z not in seen_j:
                    seen_j.add(z)
                    queue.append(z)
    return siblings, worlds


def outside_subtree(dt: DecompTree, node: int, y: int) -> List[int]:
    """Decomposition nodes whose pieces together form T(y, node)."""
    nd = dt.nodes[node]
    if y not in nd.connectors:
        raise ValueError(f"vertex {y} is not a connector of node {node}")
    if nd.parent < 0:
        return []
    sibs, worlds = side_items(dt, nd.parent, node, y)
    out = list(sibs)
    for z in worlds:
        out.extend(outside_subtree(dt, nd.parent, z))
    return out


def outside_vertices(dt: DecompTree, node: int, y: int) -> List[int]:
    """Closed vertices (hence locations) of T(y, node)."""
    out: List[int] = []
    for nid in outside_subtree(dt, node, y):
        out.extend(dt.closed_vertices(nid))
    return out


def check_invariants(dt: DecompTree, slack: int = 2) -> List[str]:
    """Structural checks used by tests and the CLI dump."""
    problems = []
    total = sum(dt.location_count)
    for nd in dt.nodes:
        if len(nd.connectors) > 2:
            problems.append(f"node {nd.id} has {len(nd.connectors)} connectors")
        if nd.kind == INTERNAL:
            if not (2 <= len(nd.children) <= 4):
                problems.append(f"node {nd.id} has {len(nd.children)} children")
            bound = math.ceil(2 * nd.size / 3) + slack
            for c in nd.children:
                # a single vertex cannot be split further, whatever it holds
                if dt.nodes[c].size > bound and dt.nodes[c].kind != VERTEX_LEAF:
                    problems.append(
                        f"child {c} of node {nd.id} has size {dt.nodes[c].size} > {bound}")
    if total > 0:
        hb = 4 * math.log2(max(total, 2)) + 8
        if dt.height > hb:
            problems.append(f"height {dt.height} exceeds {hb:.1f}")
    if any(x < 0 for x in dt.leaf_of_vertex):
        problems.append("some vertex has no leaf")
    if any(x < 0 for x in dt.leaf_of_edge):
        problems.append("some edge has no leaf")
    return problems


def to_dot(dt: DecompTree) -> str:
    lines = ["digraph decomposition {", "  node [shape=box, fontsize=10];"]
    for nd in dt.nodes:
        if nd.kind == VERTEX_LEAF:
            label = f"v{nd.leaf_vertex}"
        elif nd.kind == EDGE_LEAF:
            label = f"({nd.leaf_edge[0]},{nd.leaf_edge[1]})"
        else:
            label = f"cut {','.join(map(str, nd.cut_vertices))}"
        conn = ",".join(map(str, nd.connectors))
        lines.append(f'  n{nd.id} [label="{label}\\nconn [{conn}] size {nd.size}"];')
        for c in nd.children:
            lines.append(f"  n{nd.id} -> n{c};")
    lines.append("}")
    return "\n".join(lines) + "\n"
