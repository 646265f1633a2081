"""Uncertain points on a tree: the instance model, validation, I/O and generation."""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .tree_core import RootedIndex, Tree, TreeError, TreePoint

PROB_TOL = 1e-9
# relative slack on the covering test Ed <= lambda; absorbs rounding between
# algebraically equal evaluations of Ed (planes, edge forms, direct sums)
COVER_RTOL = 1e-10


def cover_limit(lam: float) -> float:
    """Largest Ed value still counted as covered at range ``lam``."""
    return lam + COVER_RTOL * max(1.0, abs(lam))


def covers(ed: float, lam: float) -> bool:
    return ed <= cover_limit(lam)


class InstanceError(ValueError):
    """Raised when an instance cannot be parsed or generated."""


@dataclass(frozen=True)
class Location:
    point: TreePoint
    prob: float


@dataclass
class UncertainPoint:
    weight: float
    locations: List[Location]

    @property
    def m(self) -> int:
        return len(self.locations)


@dataclass
class Instance:
    tree: Tree
    points: List[UncertainPoint]
    # (point, location, prob) for locations whose edge does not exist; only
    # populated by the permissive JSON loader so validate() can report them
    dangling: List[Tuple[int, int, float]] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def total_locations(self) -> int:
        return sum(p.m for p in self.points)

    def is_vertex_constrained(self) -> bool:
        holds = [False] * self.tree.vertex_count
        for p in self.points:
            for loc in p.locations:
                if not loc.point.is_vertex:
                    return False
                holds[loc.point.u] = True
        return all(holds)


# ---------------------------------------------------------------------------
# expected distance and probability sums


def expected_distance_naive(inst: Instance, index: RootedIndex, x: TreePoint, i: int) -> float:
    """w_i * sum_j f_ij * d(x, p_ij), by direct summation."""
    if not (0 <= i < inst.n):
        raise IndexError(f"uncertain point index {i} out of range")
    p = inst.points[i]
    if p.weight == 0.0:
        return 0.0
    total = 0.0
    for loc in p.locations:
        total += loc.prob * index.dist(x, loc.point)
    return p.weight * total


def expected_distance_at_vertices(inst: Instance, index: RootedIndex, i: int) -> np.ndarray:
    """Ed(v, P_i) for every vertex v (vectorised direct summation)."""
    p = inst.points[i]
    t = inst.tree.vertex_count
    verts = np.arange(t, dtype=np.int64)
    total = np.zeros(t)
    for loc in p.locations:
        pt = loc.point
        if pt.is_vertex:
            d = index.vertex_dist_many(verts, pt.u)
        else:
            length = inst.tree.edge_length(pt.u, pt.v)
            d = np.minimum(pt.offset + index.vertex_dist_many(verts, pt.u),
                           length - pt.offset + index.vertex_dist_many(verts, pt.v))
        total += loc.prob * d
    return p.weight * total


def probability_sum(inst: Instance, i: int, vertex_set: Iterable[int]) -> float:
    """Sum of f_ij over locations of P_i at vertices of ``vertex_set``.

    Locations in the interior of an edge count when both endpoints are in
    the set (the edge then belongs to the induced subtree).
    """
    vs: Set[int] = set(vertex_set)
    total = 0.0
    for loc in inst.points[i].locations:
        pt = loc.point
        if pt.is_vertex:
            if pt.u in vs:
                total += loc.prob
        elif pt.u in vs and pt.v in vs:
            total += loc.prob
    return total


# ---------------------------------------------------------------------------
# validation


def validate(inst: Instance) -> List[str]:
    problems: List[str] = []
    if inst.n < 1:
        problems.append("instance has no uncertain points")
    for i, j, _ in inst.dangling:
        problems.append(f"point {i} location {j}: dangling reference to a nonexistent edge")
    for i, p in enumerate(inst.points):
        if not (p.weight >= 0) or math.isinf(p.weight):
            problems.append(f"point {i}: invalid weight {p.weight}")
        if p.m < 1 and not any(d[0] == i for d in inst.dangling):
            problems.append(f"point {i}: no locations")
        total = 0.0
        for j, loc in enumerate(p.locations):
            if not (loc.prob >= 0) or math.isinf(loc.prob):
                problems.append(f"point {i} location {j}: invalid probability {loc.prob}")
            total += loc.prob
            pt = loc.point
            if pt.is_vertex:
                if not (0 <= pt.u < inst.tree.vertex_count):
                    problems.append(f"point {i} location {j}: vertex {pt.u} does not exist")
            elif not inst.tree.has_edge(pt.u, pt.v):
                problems.append(f"point {i} location {j}: edge ({pt.u},{pt.v}) does not exist")
        total += sum(d[2] for d in inst.dangling if d[0] == i)
        if p.m + sum(1 for d in inst.dangling if d[0] == i) >= 1 and abs(total - 1.0) > PROB_TOL:
            problems.append(f"point {i}: probabilities sum to {total!r}, not 1")
    return problems


# ---------------------------------------------------------------------------
# random generation


def _random_tree(rng: random.Random, t: int) -> Tree:
    edges = []
    for v in range(1, t):
        u = rng.randrange(v)
        length = 1.0 - rng.random()  # uniform in (0, 1]
        edges.append((u, v, length))
    return Tree(t, edges)


def _normalized_probs(rng: random.Random, m: int) -> List[float]:
    raw = [1.0 - rng.random() for _ in range(m)]
    s = sum(raw)
    probs = [r / s for r in raw[:-1]]
    last = 1.0 - sum(probs)
    if last < 0.0:
        # rounding pushed the partial sum over 1; absorb it in the largest entry
        k = max(range(len(probs)), key=probs.__getitem__)
        probs[k] += last
        last = 0.0
    probs.append(last)
    return probs


def generate_random(seed: int, t: int, n: int, max_m: int,
                    vertex_constrained: bool = False) -> Instance:
    """Deterministic random instance.

    Tree: uniform attachment, lengths uniform in (0, 1].  Each point gets
    1..max_m locations with random probabilities summing to exactly 1.  With
    ``vertex_constrained`` every location is on a vertex and every vertex
    holds at least one location; otherwise locations are spread over
    vertices and edge interiors.
    """
    if t < 1 or n < 1 or max_m < 1:
        raise InstanceError("t, n and max_m must all be at least 1")
    if vertex_constrained and n * max_m < t:
        raise InstanceError(
            f"cannot cover {t} vertices with at most {n * max_m} locations"
        )
    rng = random.Random(seed)
    tree = _random_tree(rng, t)
    if vertex_constrained:
        # enough locations to touch every vertex, spread over the points
        counts = [rng.randint(1, max_m) for _ in range(n)]
        deficit = t - sum(counts)
        while deficit > 0:
            i = rng.randrange(n)
            if counts[i] < max_m:
                counts[i] += 1
                deficit -= 1
        total = sum(counts)
        slots = list(range(t)) + [rng.randrange(t) for _ in range(total - t)]
        rng.shuffle(slots)
        points = []
        pos = 0
        for i in range(n):
            probs = _normalized_probs(rng, counts[i])
            locs = [Location(TreePoint.vertex(slots[pos + j]), probs[j]) for j in range(counts[i])]
            pos += counts[i]
            points.append(UncertainPoint(1.0 - rng.random(), locs))
        return Instance(tree, points)

    points = []
    for i in range(n):
        m = rng.randint(1, max_m)
        probs = _normalized_probs(rng, m)
        locs = []
        for j in range(m):
            if t == 1 or rng.random() < 0.5:
                pt = TreePoint.vertex(rng.randrange(t))
            else:
                u, v, length = tree.edges[rng.randrange(t - 1)]
                pt = TreePoint.on_edge(tree, u, v, rng.random() * length)
            locs.append(Location(pt, probs[j]))
        points.append(UncertainPoint(1.0 - rng.random(), locs))
    return Instance(tree, points)


# ---------------------------------------------------------------------------
# JSON


def fmt_float(x: float) -> float:
    """Round-trip value through 17 significant digits (exact for doubles)."""
    return float(f"{x:.17g}")


def point_to_json(tree: Tree, p: TreePoint) -> dict:
    if p.is_vertex:
        v = p.u
        if tree.vertex_count == 1:
            return {"edge": [v, v], "offset": 0.0}
        # express a vertex as offset 0 on its smallest incident edge
        nbr = min(y for y, _, _ in tree.adjacency[v])
        if v < nbr:
            return {"edge": [v, nbr], "offset": 0.0}
        return {"edge": [nbr, v], "offset": fmt_float(tree.edge_length(nbr, v))}
    return {"edge": [p.u, p.v], "offset": fmt_float(p.offset)}


def point_from_json(tree: Tree, obj: dict) -> TreePoint:
    try:
        u, v = (int(x) for x in obj["edge"])
        off = float(obj.get("offset", 0.0))
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceError(f"bad point object {obj!r}") from exc
    if u == v:
        if not (0 <= u < tree.vertex_count) or off != 0.0:
            raise InstanceError(f"bad vertex point {obj!r}")
        return TreePoint.vertex(u)
    if not tree.has_edge(u, v):
        raise TreeError(f"edge ({u},{v}) does not exist")
    length = tree.edge_length(u, v)
    # tolerate offsets that overshoot by rounding in serialisation
    if off < 0 and off > -1e-12 * max(1.0, length):
        off = 0.0
    if off > length and off - length < 1e-12 * max(1.0, length):
        off = length
    return TreePoint.on_edge(tree, u, v, off)


def instance_to_dict(inst: Instance) -> dict:
    tree = inst.tree
    return {
        "tree": {
            "vertices": tree.vertex_count,
            "edges": [[u, v, fmt_float(length)] for u, v, length in tree.edges],
        },
        "points": [
            {
                "weight": fmt_float(p.weight),
                "locations": [
                    dict(point_to_json(tree, loc.point), prob=fmt_float(loc.prob))
                    for loc in p.locations
                ],
            }
            for p in inst.points
        ],
    }


def instance_from_dict(obj: dict) -> Instance:
    try:
        tobj = obj["tree"]
        tree = Tree(int(tobj["vertices"]), [(e[0], e[1], e[2]) for e in tobj["edges"]])
        raw_points = obj["points"]
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        if isinstance(exc, TreeError):
            raise
        raise InstanceError(f"malformed instance JSON: {exc}") from exc
    points = []
    dangling = []
    for i, pobj in enumerate(raw_points):
        try:
            weight = float(pobj["weight"])
            locs = []
            for j, lobj in enumerate(pobj["locations"]):
                prob = float(lobj["prob"])
                u, v = (int(x) for x in lobj["edge"])
                if u != v and not tree.has_edge(u, v):
                    dangling.append((i, j, prob))
                    continue
                locs.append(Location(point_from_json(tree, lobj), prob))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, TreeError):
                raise
            raise InstanceError(f"malformed point {i}: {exc}") from exc
        points.append(UncertainPoint(weight, locs))
    return Instance(tree, points, dangling)


def dumps(obj: dict) -> str:
    return json.dumps(obj)


def instance_to_json(inst: Instance) -> str:
    return dumps(instance_to_dict(inst))


def instance_from_json(text: str) -> Instance:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"invalid JSON: {exc}") from exc
    return instance_from_dict(obj)
