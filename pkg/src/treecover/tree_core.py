"""Weighted trees, points on trees, and rooted query tables.

A ``Tree`` is an undirected weighted tree on vertices ``0..t-1``.  A
``TreePoint`` is a position on the tree given by an edge and an offset from
the smaller endpoint; positions at either end collapse to a vertex.  A
``RootedIndex`` roots the tree and answers distance, LCA and level-ancestor
queries in constant (or logarithmic) time after near-linear preprocessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np


class TreeError(ValueError):
    """Raised for malformed trees, bad vertex ids or points off the tree."""


class Tree:
    """Undirected tree with positive edge lengths.

    Edges are stored canonically as ``(u, v, length)`` with ``u < v`` and
    sorted by ``(u, v)``.
    """

    __slots__ = ("vertex_count", "edges", "adjacency", "_edge_id")

    def __init__(self, vertex_count: int, edges: Iterable[Tuple[int, int, float]]):
        if vertex_count < 1:
            raise TreeError("a tree needs at least one vertex")
        canon = []
        for u, v, length in edges:
            u, v, length = int(u), int(v), float(length)
            if u == v:
                raise TreeError(f"self loop at vertex {u}")
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise TreeError(f"edge ({u},{v}) references a vertex out of range")
            if not length > 0 or length != length or length == float("inf"):
                raise TreeError(f"edge ({u},{v}) has non-positive length {length}")
            if u > v:
                u, v = v, u
            canon.append((u, v, length))
        canon.sort()
        if len(canon) != vertex_count - 1:
            raise TreeError(
                f"expected {vertex_count - 1} edges for {vertex_count} vertices, got {len(canon)}"
            )
        self.vertex_count = vertex_count
        self.edges: List[Tuple[int, int, float]] = canon
        self._edge_id: Dict[Tuple[int, int], int] = {}
        self.adjacency: List[List[Tuple[int, float, int]]] = [[] for _ in range(vertex_count)]
        for eid, (u, v, length) in enumerate(canon):
            if (u, v) in self._edge_id:
                raise TreeError(f"duplicate edge ({u},{v})")
            self._edge_id[(u, v)] = eid
            self.adjacency[u].append((v, length, eid))
            self.adjacency[v].append((u, length, eid))
        # connectivity (with t-1 edges this also rules out cycles)
        seen = [False] * vertex_count
        seen[0] = True
        stack = [0]
        count = 1
        while stack:
            x = stack.pop()
            for y, _, _ in self.adjacency[x]:
                if not seen[y]:
                    seen[y] = True
                    count += 1
                    stack.append(y)
        if count != vertex_count:
            raise TreeError("edges do not form a connected tree")

    def edge_id(self, u: int, v: int) -> int:
        key = (u, v) if u < v else (v, u)
        try:
            return self._edge_id[key]
        except KeyError:
            raise TreeError(f"no edge ({u},{v}) in tree") from None

    def has_edge(self, u: int, v: int) -> bool:
        key = (u, v) if u < v else (v, u)
        return key in self._edge_id

    def edge_length(self, u: int, v: int) -> float:
        return self.edges[self.edge_id(u, v)][2]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def to_text(self) -> str:
        lines = [str(self.vertex_count)]
        for u, v, length in self.edges:
            lines.append(f"{u} {v} {length!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Tree":
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not rows:
            raise TreeError("empty tree text")
        t = int(rows[0][0])
        edges = []
        for row in rows[1:]:
            if len(row) != 3:
                raise TreeError(f"bad edge line: {' '.join(row)}")
            edges.append((int(row[0]), int(row[1]), float(row[2])))
        return cls(t, edges)


@dataclass(frozen=True)
class TreePoint:
    """A point of a tree.

    Vertex form: ``u == v`` and ``offset == 0``.  Edge form: ``u < v`` and
    ``0 < offset < length(u, v)``, the distance from ``u``.  Always build
    through :meth:`vertex` or :meth:`on_edge` so the form is canonical.
    """

    u: int
    v: int
    offset: float = 0.0

    @staticmethod
    def vertex(v: int) -> "TreePoint":
        return TreePoint(int(v), int(v), 0.0)

    @staticmethod
    def on_edge(tree: Tree, a: int, b: int, offset_from_a: float) -> "TreePoint":
        length = tree.edge_length(a, b)
        off = float(offset_from_a)
        if off < 0 or off > length:
            raise TreeError(f"offset {off} outside edge ({a},{b}) of length {length}")
        if a > b:
            a, b = b, a
            off = length - off
        if off <= 0.0:
            return TreePoint.vertex(a)
        if off >= length:
            return TreePoint.vertex(b)
        return TreePoint(a, b, off)

    @property
    def is_vertex(self) -> bool:
        return self.u == self.v

    def __repr__(self) -> str:
        if self.is_vertex:
            return f"TreePoint(vertex={self.u})"
        return f"TreePoint(edge=({self.u},{self.v}), offset={self.offset!r})"


class RootedIndex:
    """Rooted view of a tree with LCA, level-ancestor and distance tables.

    LCA uses an Euler tour with a sparse table of minimum-depth positions;
    level ancestors use binary jump pointers.
    """

    def __init__(self, tree: Tree, root: int = 0):
        t = tree.vertex_count
        if not (0 <= root < t):
            raise TreeError(f"root {root} out of range")
        self.tree = tree
        self.root = root
        parent = [-1] * t
        parent_len = [0.0] * t
        depth = [0] * t
        dist_root = [0.0] * t
        tin = [0] * t
        tout = [0] * t
        order: List[int] = []
        euler: List[int] = []
        first = [0] * t

        # iterative DFS, children visited in increasing vertex id
        children: List[List[int]] = [[] for _ in range(t)]
        stack = [(root, 0)]
        parent[root] = -1
        visited = [False] * t
        visited[root] = True
        timer = 0
        while stack:
            x, it = stack[-1]
            if it == 0:
                tin[x] = timer
                timer += 1
                order.append(x)
                first[x] = len(euler)
                nbrs = sorted(y for y, _, _ in tree.adjacency[x] if not visited[y])
                children[x] = nbrs
            euler.append(x)
            kids = children[x]
            if it < len(kids):
                y = kids[it]
                stack[-1] = (x, it + 1)
                visited[y] = True
                parent[y] = x
                length = tree.edges[tree.edge_id(x, y)][2]
                parent_len[y] = length
                depth[y] = depth[x] + 1
                dist_root[y] = dist_root[x] + length
                stack.append((y, 0))
            else:
                tout[x] = timer
                stack.pop()

        self.parent = parent
        self.parent_length = parent_len
        self.depth_hops = depth
        self.dist_to_root = dist_root
        self.children = children
        self.preorder = order
        self.tin = tin
        self.tout = tout
        self.first = first
        self.euler = euler

        # sparse table over the Euler tour, storing vertex with least depth
        m = len(euler)
        eul = np.asarray(euler, dtype=np.int64)
        dep = np.asarray(depth, dtype=np.int64)
        table = [eul]
        k = 1
        while (1 << k) <= m:
            prev = table[-1]
            half = 1 << (k - 1)
            a = prev[: m - (1 << k) + 1]
            b = prev[half : half + m - (1 << k) + 1]
            table.append(np.where(dep[a] <= dep[b], a, b))
            k += 1
        self._sparse_np = table
        self._sparse = [row.tolist() for row in table]
        self._log = [0] * (m + 1)
        for i in range(2, m + 1):
            self._log[i] = self._log[i >> 1] + 1

        # jump pointers for level ancestors
        levels = max(1, (max(depth) if depth else 0).bit_length())
        up = [list(parent)]
        up[0][root] = root
        for _ in range(1, levels):
            prev = up[-1]
            up.append([prev[prev[v]] for v in range(t)])
        self._up = up

        self._np_first = np.asarray(first, dtype=np.int64)
        self._np_dist = np.asarray(dist_root, dtype=np.float64)
        self._np_depth = dep

    # -- LCA ---------------------------------------------------------------
    def lca(self, u: int, v: int) -> int:
        t = self.tree.vertex_count
        if not (0 <= u < t and 0 <= v < t):
            raise TreeError(f"vertex id out of range in lca({u},{v})")
        a = self.first[u]
        b = self.first[v]
        if a > b:
            a, b = b, a
        k = self._log[b - a + 1]
        row = self._sparse[k]
        x = row[a]
        y = row[b - (1 << k) + 1]
        d = self.depth_hops
        return x if d[x] <= d[y] else y

    def lca_many(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        a = self._np_first[u]
        b = self._np_first[v]
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        span = hi - lo + 1
        k = np.floor(np.log2(span)).astype(np.int64)
        out = np.empty(len(lo), dtype=np.int64)
        for level in np.unique(k):
            sel = k == level
            row = self._sparse_np[level]
            x = row[lo[sel]]
            y = row[hi[sel] - (1 << int(level)) + 1]
            out[sel] = np.where(self._np_depth[x] <= self._np_depth[y], x, y)
        return out

    def is_ancestor(self, a: int, v: int) -> bool:
        """True iff ``a`` is an ancestor of ``v`` (or ``a == v``)."""
        return self.tin[a] <= self.tin[v] and self.tout[v] <= self.tout[a]

    # -- level ancestor ----------------------------------------------------
    def level_ancestor(self, v: int, d: int) -> int:
        dv = self.depth_hops[v]
        if not (0 <= d <= dv):
            raise TreeError(f"depth {d} out of range for vertex {v} at depth {dv}")
        diff = dv - d
        k = 0
        up = self._up
        while diff:
            if diff & 1:
                v = up[k][v]
            diff >>= 1
            k += 1
        return v

    # -- distances ---------------------------------------------------------
    def vertex_dist(self, u: int, v: int) -> float:
        w = self.lca(u, v)
        dr = self.dist_to_root
        return dr[u] + dr[v] - 2.0 * dr[w]

    def vertex_dist_many(self, us: np.ndarray, v: int) -> np.ndarray:
        if len(us) < 24:
            # numpy call overhead dominates on short inputs
            return np.array([self.vertex_dist(int(u), v) for u in us], dtype=np.float64)
        us = np.asarray(us, dtype=np.int64)
        vs = np.full(len(us), v, dtype=np.int64)
        w = self.lca_many(us, vs)
        return self._np_dist[us] + self._np_dist[v] - 2.0 * self._np_dist[w]

    def dist(self, p: TreePoint, q: TreePoint) -> float:
        tree = self.tree
        for pt in (p, q):
            if not pt.is_vertex and not tree.has_edge(pt.u, pt.v):
                raise TreeError(f"point {pt!r} references a nonexistent edge")
        if p.is_vertex and q.is_vertex:
            return self.vertex_dist(p.u, q.u)
        if not p.is_vertex and not q.is_vertex and p.u == q.u and p.v == q.v:
            return abs(p.offset - q.offset)
        if p.is_vertex:
            p, q = q, p
        # p lies inside an edge; q is a vertex or on a different edge
        length = tree.edge_length(p.u, p.v)
        return min(p.offset + self.point_to_vertex(q, p.u),
                   length - p.offset + self.point_to_vertex(q, p.v))

    def point_to_vertex(self, p: TreePoint, v: int) -> float:
        if p.is_vertex:
            return self.vertex_dist(p.u, v)
        length = self.tree.edge_length(p.u, p.v)
        return min(p.offset + self.vertex_dist(p.u, v),
                   length - p.offset + self.vertex_dist(p.v, v))

    def lower_endpoint(self, p: TreePoint) -> int:
        """The endpoint of p's edge farther from the root (p itself if a vertex)."""
        if p.is_vertex:
            return p.u
        return p.v if self.parent[p.v] == p.u else p.u

    def is_on_root_path(self, x: TreePoint, v: int) -> bool:
        """True iff x lies on the path from the root to vertex v."""
        return self.is_ancestor(self.lower_endpoint(x), v)


def build_rooted_index(tree: Tree, root: int = 0) -> RootedIndex:
    return RootedIndex(tree, root)


def dist(index: RootedIndex, p: TreePoint, q: TreePoint) -> float:
    return index.dist(p, q)


def lca(index: RootedIndex, u: int, v: int) -> int:
    return index.lca(u, v)


def level_ancestor(index: RootedIndex, v: int, d: int) -> int:
    return index.level_ancestor(v, d)


def is_on_root_path(index: RootedIndex, x: TreePoint, v: int) -> bool:
    return index.is_on_root_path(x, v)


def path_vertices(index: RootedIndex, u: int, v: int) -> List[int]:
    """Vertices of the simple path from u to v, in order."""
    w = index.lca(u, v)
    left = []
    x = u
    while x != w:
        left.append(x)
        x = index.parent[x]
    right = []
    x = v
    while x != w:
        right.append(x)
        x = index.parent[x]
    return left + [w] + right[::-1]


def point_along_path(tree: Tree, path: Sequence[int], delta: float) -> TreePoint:
    """The point at distance ``delta`` from ``path[0]`` walking along ``path``."""
    if delta <= 0 or len(path) == 1:
        return TreePoint.vertex(path[0])
    for a, b in zip(path, path[1:]):
        length = tree.edge_length(a, b)
        if delta < length:
            return TreePoint.on_edge(tree, a, b, delta)
        delta -= length
    return TreePoint.vertex(path[-1])


def edge_point(tree: Tree, u: int, v: int, offset: float) -> Optional[TreePoint]:
    """Convenience wrapper used by parsers: None when the edge is missing."""
    if not tree.has_edge(u, v):
        return None
    return TreePoint.on_edge(tree, u, v, offset)
