"""Parameter sweeps over the square and path families, and batch flow runs."""

from __future__ import annotations

import csv
from dataclasses import dataclass, fields

import numpy as np

from .curvature import curvature, upper_bound_dist
from .flow import FlowConfig, certify_limit, integrate
from .generators import cycle_graph, path_graph, random_scheme
from .graph import WeightingScheme, make_scheme
from .parallel import pmap

#: flow limits reach zero rates only exponentially fast, so degeneracy is numerical
LIMIT_DEGENERATE_TOL = 1e-6


def square_scheme(p: float) -> WeightingScheme:
    """4-cycle v0 v1 v2 v3 with rate p along {v0,v1}, {v3,v2} and 1 - p along the others."""
    q = 1.0 - p
    rates = np.array([[0, p, 0, q], [p, 0, q, 0], [0, q, 0, p], [q, 0, p, 0]], dtype=float)
    return make_scheme(cycle_graph(4), rates)


def path3_scheme(p: float) -> WeightingScheme:
    """Path v0 v1 v2 v3 with rate p in both directions along the inner edge."""
    q = 1.0 - p
    rates = np.array([[0, 1, 0, 0], [q, 0, p, 0], [0, p, 0, q], [0, 0, 1, 0]], dtype=float)
    return make_scheme(path_graph(4), rates)


@dataclass(frozen=True)
class SweepRow:
    p: float
    curvature: float
    upper_bound_dist: float


def _sweep(builder, vertex: str, grid) -> list[SweepRow]:
    rows = []
    for p in grid:
        p = float(p)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"grid value {p} outside [0, 1]")
        s = builder(p)
        rows.append(SweepRow(p, curvature(s, vertex).value, upper_bound_dist(s, vertex)))
    return rows


def sweep_square(grid) -> list[SweepRow]:
    """K_inf(v0) and its distance bound along the square family."""
    return _sweep(square_scheme, "0", grid)


def sweep_path3(grid) -> list[SweepRow]:
    """K_inf(v1) and its distance bound along the path family."""
    return _sweep(path3_scheme, "1", grid)


def parse_grid(spec: str) -> np.ndarray:
    """``"a:b:step"`` to an inclusive grid (the endpoint is kept when it is hit)."""
    try:
        a, b, step = (float(t) for t in spec.split(":"))
    except ValueError:
        raise ValueError(f"grid must look like a:b:step, got {spec!r}") from None
    if step <= 0 or b < a:
        raise ValueError("grid needs step > 0 and a <= b")
    count = int(np.floor((b - a) / step + 1e-9)) + 1
    return np.round(a + step * np.arange(count), 12)


@dataclass(frozen=True)
class BatchRun:
    graph: str
    seed: int
    converged: bool
    time: float
    final_min_rate: float
    limit_sharp: bool | None
    limit_degenerate: bool
    rhs_inf_norm: float


def flow_batch(graphs, seeds: int, config: FlowConfig | None = None) -> list[BatchRun]:
    """Run the flow from ``seeds`` random non-degenerate starts on each graph.

    ``graphs`` is a sequence of ``(name, MixedGraph)``. Seed ``s`` draws the
    start with ``numpy.random.default_rng(s)``. Output follows input order.
    """
    config = config or FlowConfig()
    jobs = [(name, g, s) for name, g in graphs for s in range(seeds)]

    def run(job) -> BatchRun:
        name, g, seed = job
        traj = integrate(random_scheme(g, np.random.default_rng(seed)), config)
        final = traj.final_scheme
        sharp = certify_limit(traj)[1] if traj.converged else None
        on_edges = final.rates[g.adjacency]
        low = float(on_edges.min()) if on_edges.size else 0.0
        return BatchRun(
            graph=name,
            seed=seed,
            converged=traj.converged,
            time=traj.final_time,
            final_min_rate=low,
            limit_sharp=sharp,
            limit_degenerate=low < LIMIT_DEGENERATE_TOL,
            rhs_inf_norm=traj.rhs_inf_norm[-1],
        )

    return pmap(run, jobs)


def fmt(x) -> str:
    """12 significant digits; booleans and None as plain words."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def write_rows(rows, path) -> None:
    """Dataclass rows to CSV with a header row."""
    rows = list(rows)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if not rows:
            return
        names = [f.name for f in fields(rows[0])]
        w.writerow(names)
        for r in rows:
            w.writerow([fmt(getattr(r, k)) for k in names])

