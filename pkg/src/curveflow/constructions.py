"""Explicit curvature sharp weighting schemes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import GraphValidationError, InfeasibleConstructionError
from .generators import complete_graph, require_connected
from .graph import MixedGraph, WeightingScheme, bfs, make_scheme

#: slack on the open lower bound c > 0
POSITIVITY_SLACK = 1e-10
SOLVE_TOL = 1e-10


def simple_random_walk(graph: MixedGraph) -> WeightingScheme:
    """p_xy = 1 / d_x on outgoing edges, no laziness."""
    a = graph.adjacency.astype(float)
    deg = a.sum(axis=1)
    if np.any(deg == 0):
        sink = graph.vertices[int(np.flatnonzero(deg == 0)[0])]
        raise GraphValidationError(f"vertex {sink} has no outgoing edge")
    return make_scheme(graph, a / deg[:, None])


def clique_scheme(graph: MixedGraph, clique) -> WeightingScheme:
    """Weakly connected sharp scheme that is a simple random walk on ``clique``.

    Vertices next to the clique split their rate evenly among their clique
    neighbours; vertices further out send everything to the first neighbour
    (in vertex order) that is one step closer to the clique.
    """
    require_connected(graph)
    members = sorted({graph.index[str(v)] if str(v) in graph.index else -1 for v in clique})
    if -1 in members:
        raise GraphValidationError("clique contains an unknown vertex")
    if len(members) < 2:
        raise GraphValidationError("clique needs at least two vertices")
    adj = graph.adjacency
    for a in members:
        for b in members:
            if a != b and not adj[a, b]:
                raise GraphValidationError(
                    f"{graph.vertices[a]} and {graph.vertices[b]} are not adjacent; not a clique"
                )
    dist = np.min([bfs(adj, c) for c in members], axis=0)
    in_clique = np.zeros(graph.n, dtype=bool)
    in_clique[members] = True
    p = np.zeros((graph.n, graph.n))
    k = len(members)
    for x in range(graph.n):
        if in_clique[x]:
            p[x, members] = 1.0 / (k - 1)
            p[x, x] = 0.0
        elif dist[x] == 1:
            targets = np.flatnonzero(adj[x] & in_clique)
            p[x, targets] = 1.0 / len(targets)
        else:
            parent = next(y for y in graph.out_neighbors(x) if dist[y] == dist[x] - 1)
            p[x, parent] = 1.0
    return make_scheme(graph, p)


@dataclass(frozen=True, eq=False)
class TriangleFreeSolution:
    """A solution c in (0, 1]^V of A_G c = 1 together with its kernel."""

    graph: MixedGraph
    c: dict[str, float]
    unique: bool
    kernel_dimension: int
    kernel: np.ndarray          # columns span ker A_G

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.c[v] for v in self.graph.vertices])

    def scheme(self, c=None) -> WeightingScheme:
        """The zero-laziness scheme p_xy = c_y, for this or another solution vector."""
        c = self.vector if c is None else np.asarray(c, dtype=float)
        return make_scheme(self.graph, self.graph.adjacency * c[None, :], tol=1e-9)

    def samples(self, k: int, rng: np.random.Generator) -> list[np.ndarray]:
        """Up to ``k`` further solutions in (0, 1]^V (midpoints of the base solution and random vertices)."""
        if self.unique:
            return [self.vector]
        a = self.graph.adjacency.astype(float)
        out = []
        for _ in range(k):
            res = linprog(
                rng.normal(size=self.graph.n), A_eq=a, b_eq=np.ones(self.graph.n),
                bounds=[(POSITIVITY_SLACK, 1.0)] * self.graph.n, method="highs",
            )
            if res.status == 0:
                out.append(0.5 * (self.vector + res.x))
        return out


def _check_triangle_free(graph: MixedGraph) -> None:
    a = graph.adjacency.astype(int)
    if np.trace(a @ a @ a) > 0:
        raise GraphValidationError("graph contains a triangle")


def triangle_free_solve(graph: MixedGraph) -> TriangleFreeSolution:
    """Solve A_G c = 1 over (0, 1]^V for an unmixed triangle-free graph.

    The least-norm solution is tried first; otherwise a linear programme
    maximises min_v c_v over the affine solution set. Raises
    :class:`InfeasibleConstructionError` with a certificate when no solution
    has all entries above the positivity slack.
    """
    require_connected(graph)
    _check_triangle_free(graph)
    n = graph.n
    a = graph.adjacency.astype(float)
    ones = np.ones(n)
    c0, _, rank, _ = np.linalg.lstsq(a, ones, rcond=None)
    u, s, vt = np.linalg.svd(a)
    tol = s.max() * n * np.finfo(float).eps if s.size else 0.0
    kernel = vt[np.sum(s > tol):].T
    kdim = n - int(rank)
    if np.max(np.abs(a @ c0 - ones)) > SOLVE_TOL:
        # 1 is not in the column space: y with y^T A = 0 and y^T 1 != 0
        y = u[:, np.sum(s > tol):].sum(axis=1)
        raise InfeasibleConstructionError(
            "A_G c = 1 has no solution",
            certificate={"kind": "inconsistent", "left_kernel_vector": y.tolist()},
        )
    if np.all(c0 > POSITIVITY_SLACK) and np.all(c0 <= 1 + SOLVE_TOL):
        c = np.minimum(c0, 1.0)
    else:
        # maximise t subject to A c = 1, t <= c <= 1
        cost = np.zeros(n + 1)
        cost[-1] = -1.0
        a_eq = np.hstack([a, np.zeros((n, 1))])
        a_ub = np.hstack([-np.eye(n), np.ones((n, 1))])
        res = linprog(cost, A_ub=a_ub, b_ub=np.zeros(n), A_eq=a_eq, b_eq=ones,
                      bounds=[(None, 1.0)] * n + [(None, None)], method="highs")
        if res.status != 0 or res.x[-1] <= POSITIVITY_SLACK:
            best = None if res.status != 0 else float(res.x[-1])
            worst = None if res.status != 0 else graph.vertices[int(np.argmin(res.x[:n]))]
            raise InfeasibleConstructionError(
                f"no solution of A_G c = 1 in (0, 1]^V (max min c = {best})",
                certificate={"kind": "positivity", "max_min_entry": best, "vertex": worst,
                             "violated": f"c_{worst} > 0"},
            )
        c = res.x[:n]
    return TriangleFreeSolution(
        graph=graph,
        c={v: float(val) for v, val in zip(graph.vertices, c)},
        unique=kdim == 0,
        kernel_dimension=kdim,
        kernel=kernel,
    )


def k3_catalog() -> list[WeightingScheme]:
    """The four sharp zero-laziness schemes on K_3, simple random walk first.

    Each is given by (p01, p02, p10, p12, p20, p21).
    """
    g = complete_graph(3)
    rows = [
        (0.5, 0.5, 0.5, 0.5, 0.5, 0.5),
        (0.0, 1.0, 0.5, 0.5, 1.0, 0.0),
        (0.5, 0.5, 0.0, 1.0, 0.0, 1.0),
        (1.0, 0.0, 1.0, 0.0, 0.5, 0.5),
    ]
    out = []
    for p01, p02, p10, p12, p20, p21 in rows:
        p = np.array([[0, p01, p02], [p10, 0, p12], [p20, p21, 0]], dtype=float)
        out.append(make_scheme(g, p))
    return out


def nested_complete_scheme(n: int, m: int) -> WeightingScheme:
    """Simple random walk on K_m inside K_n, outside vertices jump into K_m uniformly."""
    if not 2 <= m <= n:
        raise ValueError("need 2 <= m <= n")
    p = np.zeros((n, n))
    p[:m, :m] = 1.0 / (m - 1)
    np.fill_diagonal(p, 0.0)
    p[m:, :m] = 1.0 / m
    return make_scheme(complete_graph(n), p)
