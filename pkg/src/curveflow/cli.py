"""Command-line interface: ``curveflow <subcommand> ...``.

Exit codes: 0 success (including a flow that has not converged by t_max),
1 malformed input, 2 infeasible construction, 3 flow blow-up.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .constructions import clique_scheme, k3_catalog, simple_random_walk, triangle_free_solve
from .curvature import curvature, pairwise_lower_bound, theoretical_bounds, upper_bound_dist
from .errors import CurveflowError, FlowBlowUpError, InfeasibleConstructionError
from .flow import FlowConfig, FlowTrajectory, certify_limit, integrate
from .graph import WeightingScheme, degeneracy, read_graph, read_scheme, scheme_to_document, write_scheme
from .sharpness import SharpnessReport, is_n_sharp, sharpness_all
from .sweep import flow_batch, fmt, parse_grid, sweep_path3, sweep_square, write_rows

EXIT_MALFORMED = 1
EXIT_INFEASIBLE = 2
EXIT_BLOWUP = 3


def num(x):
    """Round to 12 significant digits for printing; keeps inf/None readable in JSON."""
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.12g}")


def parse_dimension(text: str) -> float:
    if text.strip().lower() == "inf":
        return math.inf
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"dimension must be a positive number or 'inf', got {text!r}")
    if not value > 0 or math.isinf(value):
        raise argparse.ArgumentTypeError("dimension must be a positive number or 'inf'")
    return value


# --- reports -----------------------------------------------------------------

@dataclass(frozen=True)
class VertexSummary:
    vertex: str
    curvature: float
    upper_bound_dist: float | None
    residual_norm: float | None
    sharp: bool | None
    degenerate: bool
    isolated: bool


def vertex_summaries(scheme: WeightingScheme, N=math.inf) -> list[VertexSummary]:
    reports = sharpness_all(scheme)
    bad = degeneracy(scheme).degenerate_vertices
    out = []
    for v in scheme.vertices:
        k = curvature(scheme, v, N).value
        r = reports.get(v)
        if r is None:
            out.append(VertexSummary(v, k, None, None, None, v in bad, True))
            continue
        d = scheme.weighted_degree[scheme.idx(v)]
        kd = r.k_inf_dist - (0.0 if math.isinf(N) else 2 * d / N)
        out.append(VertexSummary(v, k, kd, r.residual_norm, r.sharp, v in bad, False))
    return out


def report_render(rows: list[VertexSummary]) -> str:
    """Fixed-width table: vertex, K_N, K_N^d, residual norm, sharp?, degenerate?"""
    header = f"{'vertex':<10} {'K_N':>20} {'K_N^d':>20} {'residual':>20} {'sharp':>9} {'degenerate':>10}"
    lines = [header, "-" * len(header)]
    for r in rows:
        if r.isolated:
            kd, res, sharp = "-", "-", "isolated"
        else:
            kd, res, sharp = fmt(r.upper_bound_dist), fmt(r.residual_norm), "yes" if r.sharp else "no"
        lines.append(
            f"{r.vertex:<10} {fmt(r.curvature):>20} {kd:>20} {res:>20} {sharp:>9} "
            f"{'yes' if r.degenerate else 'no':>10}"
        )
    return "\n".join(lines)


def sharpness_to_json(r: SharpnessReport) -> dict:
    return {
        "vertex": r.x,
        "k_inf_dist": num(r.k_inf_dist),
        "four_q_one": [num(v) for v in r.four_q_one],
        "residual": [num(v) for v in r.residual],
        "residual_norm": num(r.residual_norm),
        "sharp_via_q": r.sharp_via_q,
        "sharp_via_m2": r.sharp_via_m2,
        "one_ball_residuals": [num(v) for v in r.one_ball_residuals],
        "volume_homogeneous": r.volume_homogeneous,
        "reversible": r.reversible,
        "degenerate": r.degenerate,
    }


# --- trajectory output -----------------------------------------------------------

def rate_columns(scheme: WeightingScheme) -> list[tuple[int, int]]:
    """Edge pairs (x, y) in lexicographic order of vertex positions."""
    return [tuple(map(int, e)) for e in np.argwhere(scheme.graph.adjacency)]


def write_trajectory(trajectory: FlowTrajectory, path) -> None:
    """One CSV row per snapshot: t, rhs_inf_norm, row_sum_defect, min_rate, p_<x>_<y>..."""
    first = trajectory.schemes[0]
    cols = rate_columns(first)
    v = first.vertices
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "rhs_inf_norm", "row_sum_defect", "min_rate"] + [f"p_{v[i]}_{v[j]}" for i, j in cols])
        for k, s in enumerate(trajectory.schemes):
            w.writerow(
                [fmt(trajectory.times[k]), fmt(trajectory.rhs_inf_norm[k]),
                 fmt(trajectory.row_sum_defect[k]), fmt(trajectory.min_rate[k])]
                + [fmt(s.rates[i, j]) for i, j in cols]
            )


# --- subcommands ------------------------------------------------------------------

def cmd_curvature(args) -> int:
    scheme = read_scheme(args.graph)
    N = args.dimension
    targets = [args.vertex] if args.vertex is not None else list(scheme.vertices)
    if args.table:
        rows = [r for r in vertex_summaries(scheme, N) if r.vertex in targets]
        print(report_render(rows))
        return 0
    out = []
    for v in targets:
        res = curvature(scheme, v, N)
        entry = {"vertex": res.x, "curvature": num(res.value), "route": res.route,
                 "upper_bound_dist": None, "lower_bound": None, "upper_bound": None,
                 "pairwise_lower_bound": None}
        if not scheme.is_isolated(v):
            d = scheme.weighted_degree[scheme.idx(v)]
            entry["upper_bound_dist"] = num(upper_bound_dist(scheme, v) - (0 if math.isinf(N) else 2 * d / N))
            if N >= 2:
                lo, hi = theoretical_bounds(scheme, v, N)
                entry["lower_bound"], entry["upper_bound"] = num(lo), num(hi)
                entry["pairwise_lower_bound"] = num(pairwise_lower_bound(scheme, v, N))
        out.append(entry)
    print(json.dumps({"dimension": num(N), "vertices": out}, indent=2))
    return 0


def cmd_sharpness(args) -> int:
    scheme = read_scheme(args.graph)
    reports = sharpness_all(scheme, args.tol)
    if args.table:
        print(report_render(vertex_summaries(scheme, args.dimension or math.inf)))
        return 0
    items = []
    for r in reports.values():
        item = sharpness_to_json(r)
        if args.dimension is not None:
            item["n_sharp"] = is_n_sharp(scheme, r.x, args.dimension)
        items.append(item)
    isolated = [v for v in scheme.vertices if v not in reports]
    print(json.dumps({"tolerance": num(args.tol), "vertices": items, "isolated": isolated}, indent=2))
    return 0


def cmd_flow(args) -> int:
    scheme = read_scheme(args.graph)
    config = FlowConfig(dt=args.dt, t_max=args.t_max, convergence_tol=args.tol, record_every=args.record_every)
    traj = integrate(scheme, config)
    if args.out:
        write_trajectory(traj, args.out)
    if args.final:
        write_scheme(traj.final_scheme, args.final)
    summary = {
        "converged": traj.converged,
        "t": num(traj.final_time),
        "steps": traj.steps,
        "rhs_inf_norm": num(traj.rhs_inf_norm[-1]),
        "limit_sharp": certify_limit(traj)[1] if traj.converged else None,
        "final": scheme_to_document(traj.final_scheme) if not args.final else args.final,
    }
    if not args.final:
        for e in summary["final"]["rates"]:
            e["p"] = num(e["p"])
    print(json.dumps(summary, indent=2))
    return 0


def cmd_construct(args) -> int:
    if args.kind == "k3-catalog":
        docs = [scheme_to_document(s) for s in k3_catalog()]
        payload = docs if args.index is None else docs[args.index]
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        return 0
    if args.graph is None:
        raise CurveflowError(f"--graph is required for --kind {args.kind}")
    graph = read_graph(args.graph)
    if args.kind == "srw":
        scheme = simple_random_walk(graph)
    elif args.kind == "clique":
        if not args.clique:
            raise CurveflowError("--clique is required for --kind clique")
        scheme = clique_scheme(graph, [v.strip() for v in args.clique.split(",") if v.strip()])
    else:
        scheme = triangle_free_solve(graph).scheme()
    write_scheme(scheme, args.out)
    return 0


def cmd_sweep(args) -> int:
    grid = parse_grid(args.grid)
    rows = sweep_square(grid) if args.family == "square" else sweep_path3(grid)
    write_rows(rows, args.out)
    return 0


def cmd_flow_batch(args) -> int:
    files = sorted(Path(args.graphs).glob("*.json"))
    if not files:
        raise CurveflowError(f"no *.json graphs in {args.graphs}")
    graphs = [(f.stem, read_graph(f)) for f in files]
    config = FlowConfig(dt=args.dt, t_max=args.t_max, convergence_tol=args.tol)
    write_rows(flow_batch(graphs, args.seeds, config), args.out)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_MALFORMED, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="curveflow", description="Bakry-Emery curvature and curvature flow on Markov weighted graphs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("curvature", help="curvature K_N per vertex with a-priori bounds")
    p.add_argument("graph")
    p.add_argument("--dimension", type=parse_dimension, default=math.inf)
    p.add_argument("--vertex")
    p.add_argument("--table", action="store_true", help="print a text table instead of JSON")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("sharpness", help="curvature sharpness report per vertex")
    p.add_argument("graph")
    p.add_argument("--dimension", type=parse_dimension)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--table", action="store_true")
    p.set_defaults(func=cmd_sharpness)

    p = sub.add_parser("flow", help="integrate the curvature flow")
    p.add_argument("graph")
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--t-max", type=float, default=100.0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--record-every", type=int, default=10)
    p.add_argument("--out")
    p.add_argument("--final")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("construct", help="build a sharp weighting scheme")
    p.add_argument("--kind", required=True, choices=["srw", "clique", "triangle-free", "k3-catalog"])
    p.add_argument("--graph")
    p.add_argument("--clique")
    p.add_argument("--index", type=int, choices=range(4), help="k3-catalog: write only this scheme")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("sweep", help="curvature along the square or path3 family")
    p.add_argument("--family", required=True, choices=["square", "path3"])
    p.add_argument("--grid", required=True, help="a:b:step")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("flow-batch", help="flow runs from random starts on a directory of graphs")
    p.add_argument("--graphs", required=True)
    p.add_argument("--seeds", type=int, required=True)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--t-max", type=float, default=100.0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_flow_batch)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # usage errors exit 1, --help exits 0
        return exc.code if isinstance(exc.code, int) else EXIT_MALFORMED
    try:
        return args.func(args)
    except InfeasibleConstructionError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        if exc.certificate is not None:
            print(json.dumps(exc.certificate), file=sys.stderr)
        return EXIT_INFEASIBLE
    except FlowBlowUpError as exc:
        print(f"flow blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except (CurveflowError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
