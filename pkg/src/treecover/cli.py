"""Command-line front end.

Exit codes: 0 success, 1 internal error, 2 invalid input, 3 infeasible
lambda, 64 bad usage.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from .candidate_center import A2, Infeasible
from .cover_solver import CoverContext, solution_to_dict, to_dot
from .decomposition import to_dot as decomposition_dot
from .dist_oracle import build_a3
from .decomposition import decompose
from .instance import (Instance, InstanceError, dumps, fmt_float, generate_random,
                       instance_from_json, instance_to_json, point_to_json, validate)
from .kcenter_solver import solve_kcenter
from .reduction import map_back, split_instance, vc_to_dict
from .tree_core import RootedIndex, TreeError, TreePoint

EXIT_OK, EXIT_INTERNAL, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_USAGE = 0, 1, 2, 3, 64

log = logging.getLogger("treecover")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="treecover", description="Cover uncertain points on a tree.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def io(sp, output=True):
        sp.add_argument("--input", metavar="PATH", help="instance JSON (default stdin)")
        if output:
            sp.add_argument("--output", metavar="PATH", help="result file (default stdout)")

    sp = sub.add_parser("cover", help="minimum number of centers for a covering range")
    io(sp)
    sp.add_argument("--lambda", dest="lam", type=float, required=True, metavar="FLOAT")
    sp.add_argument("--dot", metavar="PATH", help="write the tree with centers as DOT")
    sp.add_argument("--dump-decomposition", action="store_true",
                    help="print the decomposition tree as DOT on stderr")
    sp.add_argument("--keep-reduction", action="store_true",
                    help="include the reduced instance in the output")
    sp.add_argument("--trace-coverage", action="store_true",
                    help="log every coverage report on stderr")
    sp.add_argument("--dump-candidates", action="store_true",
                    help="print each point's farthest covering point toward the root on stderr")

    sp = sub.add_parser("kcenter", help="smallest covering range for k centers")
    io(sp)
    sp.add_argument("-k", type=int, required=True, metavar="INT")

    sp = sub.add_parser("medians", help="median vertex and its expected distance per point")
    io(sp)

    sp = sub.add_parser("eval", help="expected distance of one point at a tree point")
    io(sp)
    sp.add_argument("--point", required=True, metavar="U,V,OFFSET")
    sp.add_argument("--i", dest="i", type=int, required=True, metavar="INT")
    sp.add_argument("--edge-form", action="store_true",
                    help="also print the linear form along the point's edge")

    sp = sub.add_parser("gen", help="random instance")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--t", type=int, required=True, metavar="INT")
    sp.add_argument("--n", type=int, required=True, metavar="INT")
    sp.add_argument("--max-m", type=int, required=True, metavar="INT")
    sp.add_argument("--vertex-constrained", action="store_true")
    sp.add_argument("--output", metavar="PATH")

    sp = sub.add_parser("check", help="randomised cross-checks against brute force")
    sp.add_argument("--suite", required=True, choices=["median", "ed", "cover", "kcenter"])
    sp.add_argument("--seed-range", required=True, metavar="A..B")
    return p


def _read_instance(path: Optional[str]) -> Instance:
    text = sys.stdin.read() if path in (None, "-") else open(path).read()
    inst = instance_from_json(text)
    problems = validate(inst)
    if problems:
        raise InstanceError("; ".join(problems))
    return inst


def _write(path: Optional[str], text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _cmd_cover(args) -> int:
    inst = _read_instance(args.input)
    ctx = CoverContext(inst)
    if args.dump_decomposition:
        sys.stderr.write(decomposition_dot(ctx.dt))
    trace = None
    if args.trace_coverage:
        def trace(cid, x, got):
            where = point_to_json(inst.tree, map_back(ctx.vc, [x])[0])
            sys.stderr.write(f"center {cid} at {json.dumps(where)} covers {got}\n")
    if args.dump_candidates:
        a2 = A2(ctx.rinst, ctx.mt, ctx.a3, args.lam)
        for r, i in enumerate(ctx.mt.order):
            where = point_to_json(inst.tree, map_back(ctx.vc, [a2.to_tree_point(a2.q[r])])[0])
            sys.stderr.write(f"q {i} {json.dumps(where)}\n")
    sol = ctx.solve(args.lam, trace)
    out = solution_to_dict(inst, sol)
    if args.keep_reduction:
        out["reduction"] = vc_to_dict(ctx.vc)
    _write(args.output, dumps(out))
    if args.dot:
        med = [p.u for p in (ctx.vc.vertex_origin[m] for m in ctx.medians) if p.is_vertex]
        with open(args.dot, "w") as fh:
            fh.write(to_dot(inst, sol.centers, med))
    return EXIT_OK


def _cmd_kcenter(args) -> int:
    inst = _read_instance(args.input)
    sol = solve_kcenter(inst, args.k)
    out = {"k": args.k, "lambda_opt": fmt_float(sol.lam_opt),
           "centers": [point_to_json(inst.tree, c) for c in sol.centers]}
    _write(args.output, dumps(out))
    return EXIT_OK


def _cmd_medians(args) -> int:
    inst = _read_instance(args.input)
    ctx = CoverContext(inst)
    rows = []
    for i in range(inst.n):
        p = ctx.vc.vertex_origin[ctx.medians[i]]
        rows.append((i, p, ctx.median_values[i]))
    if args.output and args.output.endswith(".tsv"):
        lines = ["i\tvertex\ted"]
        for i, p, val in rows:
            where = str(p.u) if p.is_vertex else f"{p.u},{p.v},{fmt_float(p.offset)!r}"
            lines.append(f"{i}\t{where}\t{fmt_float(val)!r}")
        _write(args.output, "\n".join(lines))
    else:
        out = []
        for i, p, val in rows:
            row = {"i": i, "ed": fmt_float(val)}
            if p.is_vertex:
                row["vertex"] = p.u
            else:
                row["point"] = point_to_json(inst.tree, p)
            out.append(row)
        _write(args.output, dumps({"medians": out}))
    return EXIT_OK


def _parse_point(inst: Instance, text: str) -> TreePoint:
    try:
        u, v, off = text.split(",")
        u, v, off = int(u), int(v), float(off)
    except ValueError:
        raise UsageError(f"--point expects U,V,OFFSET, got {text!r}")
    if u == v:
        if off != 0.0 or not (0 <= u < inst.tree.vertex_count):
            raise InstanceError(f"bad vertex point {text!r}")
        return TreePoint.vertex(u)
    if not inst.tree.has_edge(u, v):
        raise InstanceError(f"edge ({u},{v}) does not exist")
    length = inst.tree.edge_length(u, v)
    if not (0.0 <= off <= length):
        raise InstanceError(f"offset {off} outside edge of length {length}")
    return TreePoint.on_edge(inst.tree, u, v, off)


def _cmd_eval(args) -> int:
    inst = _read_instance(args.input)
    if not (0 <= args.i < inst.n):
        raise InstanceError(f"point index {args.i} out of range")
    x = _parse_point(inst, args.point)
    split, locate = split_instance(inst)
    index = RootedIndex(split.tree, 0)
    a3 = build_a3(split, decompose(split, index), index)
    ed = a3.query(locate(x), args.i)
    out = {"i": args.i, "point": point_to_json(inst.tree, x), "ed": fmt_float(ed)}
    if args.edge_form:
        out["edge_form"] = _edge_form(inst, split, locate, a3, x, args.i)
    _write(args.output, dumps(out))
    return EXIT_OK


def _edge_form(inst: Instance, split: Instance, locate, a3, x: TreePoint, i: int):
    """Ed along x's edge as intercept + slope * offset, on the linear piece holding x.

    Locations inside the edge make Ed piecewise linear there, so the form
    carries the offset interval where it holds.
    """
    tree = inst.tree
    if tree.vertex_count == 1:
        return None
    if x.is_vertex:
        nbr = min(y for y, _, _ in tree.adjacency[x.u])
        u, v = min(x.u, nbr), max(x.u, nbr)
        off = 0.0 if x.u == u else tree.edge_length(u, v)
    else:
        u, v, off = x.u, x.v, x.offset
    length = tree.edge_length(u, v)
    # split-tree vertices along (u, v) with their offsets
    stops = sorted({0.0, length} | {loc.point.offset for p in inst.points for loc in p.locations
                                    if not loc.point.is_vertex and (loc.point.u, loc.point.v) == (u, v)})
    k = max(0, min(len(stops) - 2, next(j for j in range(len(stops) - 1)
                                        if off <= stops[j + 1])))
    lo, hi = stops[k], stops[k + 1]
    e_lo = a3.query(locate(TreePoint.on_edge(tree, u, v, lo)), i)
    e_hi = a3.query(locate(TreePoint.on_edge(tree, u, v, hi)), i)
    slope = (e_hi - e_lo) / (hi - lo)
    return {"edge": [u, v], "slope": fmt_float(slope), "intercept": fmt_float(e_lo - slope * lo),
            "valid_from": fmt_float(lo), "valid_to": fmt_float(hi)}


def _cmd_gen(args) -> int:
    if args.t < 1 or args.n < 1 or args.max_m < 1:
        raise UsageError("--t, --n and --max-m must be positive")
    inst = generate_random(args.seed, args.t, args.n, args.max_m, args.vertex_constrained)
    _write(args.output, instance_to_json(inst))
    return EXIT_OK


def _seed_range(text: str) -> range:
    try:
        a, b = text.split("..")
        return range(int(a), int(b) + 1)
    except ValueError:
        raise UsageError(f"--seed-range expects A..B, got {text!r}")


def _cmd_check(args) -> int:
    from . import checks
    report = checks.run_suite(args.suite, _seed_range(args.seed_range))
    sys.stdout.write(report.summary() + "\n")
    return EXIT_OK if report.passed else EXIT_INTERNAL


COMMANDS = {"cover": _cmd_cover, "kcenter": _cmd_kcenter, "medians": _cmd_medians,
            "eval": _cmd_eval, "gen": _cmd_gen, "check": _cmd_check}


def run(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "lam", 0.0) is not None and not (getattr(args, "lam", 0.0) >= 0.0):
            raise UsageError("--lambda must be a non-negative number")
        if args.command == "kcenter" and args.k < 1:
            raise UsageError("-k must be at least 1")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"treecover: {exc}\n")
        return EXIT_USAGE
    except Infeasible as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_INFEASIBLE
    except (InstanceError, TreeError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"treecover: invalid input: {exc}\n")
        return EXIT_INVALID
    except Exception as exc:  # pragma: no cover - reported, not raised
        log.exception("internal error: %s", exc)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())
