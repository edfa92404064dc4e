"""Mixed graphs, Markovian weighting schemes and directed distances.

A :class:`MixedGraph` carries the topology (one-sided and two-sided edges),
a :class:`WeightingScheme` attaches a row-stochastic rate matrix to it. The
diagonal of the rate matrix is the laziness and is never an edge.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import GraphValidationError

INF = math.inf
ROW_TOL = 1e-12


@dataclass(frozen=True)
class MixedGraph:
    """Finite simple mixed graph.

    Two-sided edges are stored as pairs ordered by vertex position, one-sided
    edges as ``(tail, head)``.
    """

    vertices: tuple[str, ...]
    one_sided_edges: frozenset[tuple[str, str]] = frozenset()
    two_sided_edges: frozenset[tuple[str, str]] = frozenset()

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphValidationError("duplicate vertex identifier")
        index = {v: i for i, v in enumerate(self.vertices)}
        for kind, edges in (("one-sided", self.one_sided_edges), ("two-sided", self.two_sided_edges)):
            for x, y in edges:
                if x not in index or y not in index:
                    raise GraphValidationError(f"{kind} edge ({x}, {y}) references an unknown vertex")
                if x == y:
                    raise GraphValidationError(f"loop at vertex {x}")
        for x, y in self.two_sided_edges:
            if index[x] > index[y]:
                raise GraphValidationError("two-sided edges must be stored in vertex order; use MixedGraph.build")
        pairs = [frozenset(e) for e in self.one_sided_edges] + [frozenset(e) for e in self.two_sided_edges]
        if len(set(pairs)) != len(pairs):
            raise GraphValidationError("a vertex pair carries more than one edge")

    @classmethod
    def build(
        cls,
        vertices: Iterable,
        two_sided: Iterable[Sequence] = (),
        one_sided: Iterable[Sequence] = (),
    ) -> "MixedGraph":
        """Build a graph from plain edge lists, rejecting duplicates."""
        vertices = tuple(str(v) for v in vertices)
        index = {v: i for i, v in enumerate(vertices)}
        seen = set()
        two = set()
        for e in two_sided:
            x, y = _pair(e)
            if x not in index or y not in index:
                raise GraphValidationError(f"two-sided edge ({x}, {y}) references an unknown vertex")
            key = frozenset((x, y))
            if key in seen:
                raise GraphValidationError(f"duplicate edge {{{x}, {y}}}")
            seen.add(key)
            two.add((x, y) if index[x] <= index[y] else (y, x))
        one = set()
        for e in one_sided:
            x, y = _pair(e)
            key = frozenset((x, y))
            if key in seen:
                raise GraphValidationError(f"duplicate edge ({x}, {y})")
            seen.add(key)
            one.add((x, y))
        return cls(vertices, frozenset(one), frozenset(two))

    @property
    def n(self) -> int:
        return len(self.vertices)

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Boolean matrix with ``A[i, j]`` true iff there is an edge from i to j."""
        a = np.zeros((self.n, self.n), dtype=bool)
        for x, y in self.one_sided_edges:
            a[self.index[x], self.index[y]] = True
        for x, y in self.two_sided_edges:
            i, j = self.index[x], self.index[y]
            a[i, j] = a[j, i] = True
        a.flags.writeable = False
        return a

    @property
    def is_unmixed(self) -> bool:
        return not self.one_sided_edges

    def out_neighbors(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[i])

    def is_subgraph_of(self, other: "MixedGraph") -> bool:
        """Subgraph relation on a shared vertex set (two-sided edges stay two-sided)."""
        if self.vertices != other.vertices:
            return False
        if not self.two_sided_edges <= other.two_sided_edges:
            return False
        return all(other.adjacency[self.index[x], self.index[y]] for x, y in self.one_sided_edges)

    def sorted_edges(self) -> tuple[list[tuple[str, str]], list[tuple[str, str]]]:
        key = lambda e: (self.index[e[0]], self.index[e[1]])  # noqa: E731
        return sorted(self.two_sided_edges, key=key), sorted(self.one_sided_edges, key=key)


def _pair(e) -> tuple[str, str]:
    if len(e) != 2:
        raise GraphValidationError(f"edge {e!r} must have two endpoints")
    return str(e[0]), str(e[1])


@dataclass(frozen=True, eq=False)
class WeightingScheme:
    """Rate matrix attached to a mixed graph.

    ``rates[i, j]`` is p_{v_i v_j}; the diagonal holds the laziness. The
    constructor only checks shape, finiteness and support; use
    :func:`make_scheme` or :func:`load_document` for Markovian validation.
    """

    graph: MixedGraph
    rates: np.ndarray

    def __post_init__(self):
        rates = np.array(self.rates, dtype=float)
        n = self.graph.n
        if rates.shape != (n, n):
            raise GraphValidationError(f"rate matrix has shape {rates.shape}, expected {(n, n)}")
        if not np.all(np.isfinite(rates)):
            raise GraphValidationError("rate matrix contains non-finite values")
        off = ~self.graph.adjacency & ~np.eye(n, dtype=bool)
        bad = np.argwhere(off & (rates != 0.0))
        if len(bad):
            i, j = bad[0]
            v = self.graph.vertices
            raise GraphValidationError(f"positive rate on non-edge ({v[i]}, {v[j]})")
        rates.flags.writeable = False
        object.__setattr__(self, "rates", rates)

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.graph.vertices

    @property
    def n(self) -> int:
        return self.graph.n

    def idx(self, x) -> int:
        if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
            return int(x)
        try:
            return self.graph.index[str(x)]
        except KeyError:
            raise GraphValidationError(f"unknown vertex {x!r}") from None

    @cached_property
    def laziness(self) -> np.ndarray:
        return np.diag(self.rates).copy()

    @cached_property
    def off_diagonal(self) -> np.ndarray:
        p = self.rates.copy()
        np.fill_diagonal(p, 0.0)
        return p

    @cached_property
    def weighted_degree(self) -> np.ndarray:
        """D_x, the total off-diagonal rate out of each vertex."""
        return self.off_diagonal.sum(axis=1)

    @cached_property
    def two_step(self) -> np.ndarray:
        """p^{(2)} = P @ P including laziness."""
        return self.rates @ self.rates

    @property
    def row_sum_defect(self) -> float:
        return float(np.max(np.abs(self.rates.sum(axis=1) - 1.0))) if self.n else 0.0

    def is_isolated(self, x) -> bool:
        return not self.weighted_degree[self.idx(x)] > 0.0

    def with_graph(self, graph: MixedGraph) -> "WeightingScheme":
        """Same rates on another topology over the same vertex list."""
        if graph.vertices != self.graph.vertices:
            raise GraphValidationError("vertex lists differ")
        return WeightingScheme(graph, self.rates)

    def restricted_to_support(self) -> "WeightingScheme":
        """The scheme on its induced subgraph G_P."""
        return WeightingScheme(induced_subgraph(self), self.rates)

    def rate(self, x, y) -> float:
        return float(self.rates[self.idx(x), self.idx(y)])


@dataclass(frozen=True)
class DegeneracyReport:
    degenerate_one_sided: frozenset[tuple[str, str]]
    degenerate_two_sided: frozenset[tuple[str, str]]
    degenerate_vertices: frozenset[str]

    @property
    def is_degenerate(self) -> bool:
        return bool(self.degenerate_one_sided or self.degenerate_two_sided)


@dataclass(frozen=True)
class DistanceField:
    """Directed distances from one source in G and in G_P, plus 1/2-spheres and balls."""

    source: str
    d_G: dict[str, float]
    d_P: dict[str, float]

    def sphere(self, r: int, which: str = "G") -> list[str]:
        d = self.d_G if which == "G" else self.d_P
        return [v for v, dv in d.items() if dv == r]

    def ball(self, r: int, which: str = "G") -> list[str]:
        d = self.d_G if which == "G" else self.d_P
        return [v for v, dv in d.items() if dv <= r]


def make_scheme(
    graph: MixedGraph,
    rates: np.ndarray | Mapping[tuple[str, str], float],
    laziness: Mapping[str, float] | None = None,
    tol: float = ROW_TOL,
) -> WeightingScheme:
    """Validate rates on ``graph`` and return a Markovian scheme.

    ``rates`` is either a full matrix (diagonal = laziness) or a mapping of
    ``(from, to)`` pairs. Rows within ``tol`` of 1 are renormalized exactly.
    """
    n = graph.n
    if isinstance(rates, Mapping):
        p = np.zeros((n, n))
        for (x, y), value in rates.items():
            x, y = str(x), str(y)
            if x not in graph.index or y not in graph.index:
                raise GraphValidationError(f"rate ({x}, {y}) references an unknown vertex")
            if x == y:
                raise GraphValidationError(f"rate ({x}, {x}) is a laziness value; use the laziness map")
            p[graph.index[x], graph.index[y]] = float(value)
    else:
        p = np.array(rates, dtype=float)
        if p.shape != (n, n):
            raise GraphValidationError(f"rate matrix has shape {p.shape}, expected {(n, n)}")
    for v, value in (laziness or {}).items():
        if str(v) not in graph.index:
            raise GraphValidationError(f"laziness for unknown vertex {v!r}")
        p[graph.index[str(v)], graph.index[str(v)]] = float(value)
    if not np.all(np.isfinite(p)):
        raise GraphValidationError("rates must be finite")
    if np.any(p < 0):
        i, j = np.argwhere(p < 0)[0]
        raise GraphValidationError(f"negative rate p[{graph.vertices[i]}, {graph.vertices[j]}] = {p[i, j]}")
    if np.any(p > 1):
        i, j = np.argwhere(p > 1)[0]
        raise GraphValidationError(f"rate p[{graph.vertices[i]}, {graph.vertices[j]}] = {p[i, j]} exceeds 1")
    sums = p.sum(axis=1)
    for i, s in enumerate(sums):
        if abs(s - 1.0) > tol:
            raise GraphValidationError(f"row {graph.vertices[i]} sums to {s!r}, not 1")
    p = p / sums[:, None]
    return WeightingScheme(graph, p)


def degeneracy(scheme: WeightingScheme) -> DegeneracyReport:
    g, p = scheme.graph, scheme.rates
    one = frozenset(e for e in g.one_sided_edges if p[g.index[e[0]], g.index[e[1]]] == 0.0)
    two = frozenset(
        e for e in g.two_sided_edges
        if p[g.index[e[0]], g.index[e[1]]] == 0.0 or p[g.index[e[1]], g.index[e[0]]] == 0.0
    )
    zero_out = g.adjacency & (p == 0.0)
    verts = frozenset(g.vertices[i] for i in np.flatnonzero(zero_out.any(axis=1)))
    return DegeneracyReport(one, two, verts)


def induced_subgraph(scheme: WeightingScheme) -> MixedGraph:
    """G_P: keep (x, y) one-sided iff p_xy > 0 = p_yx, two-sided iff both positive."""
    g, p = scheme.graph, scheme.rates
    v = g.vertices
    pos = g.adjacency & (p > 0.0)
    one, two = set(), set()
    for i, j in zip(*np.nonzero(pos)):
        if pos[j, i]:
            if i < j:
                two.add((v[i], v[j]))
        else:
            one.add((v[i], v[j]))
    return MixedGraph(g.vertices, frozenset(one), frozenset(two))


def bfs(adjacency: np.ndarray, source: int) -> list[float]:
    """Directed breadth-first distances; unreachable vertices get ``INF``."""
    dist: list[float] = [INF] * adjacency.shape[0]
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in np.flatnonzero(adjacency[u]):
            if dist[w] == INF:
                dist[w] = dist[u] + 1
                queue.append(int(w))
    return dist


def distances(scheme: WeightingScheme, x) -> DistanceField:
    i = scheme.idx(x)
    d_g = bfs(scheme.graph.adjacency, i)
    d_p = bfs(induced_subgraph(scheme).adjacency, i)
    v = scheme.vertices
    return DistanceField(v[i], dict(zip(v, d_g)), dict(zip(v, d_p)))


# --- JSON documents -------------------------------------------------------

def graph_from_document(doc: Mapping) -> MixedGraph:
    if not isinstance(doc, Mapping) or "vertices" not in doc:
        raise GraphValidationError("graph document needs a 'vertices' list")
    try:
        return MixedGraph.build(
            doc["vertices"], doc.get("two_sided_edges", ()), doc.get("one_sided_edges", ())
        )
    except TypeError as exc:
        raise GraphValidationError(f"malformed edge list: {exc}") from None


def load_document(doc: Mapping, tol: float = ROW_TOL) -> tuple[WeightingScheme, DegeneracyReport]:
    """Parse and validate a graph document with rates."""
    graph = graph_from_document(doc)
    rates = {}
    for entry in doc.get("rates", ()):
        try:
            key = (str(entry["from"]), str(entry["to"]))
            value = float(entry["p"])
        except (KeyError, TypeError, ValueError):
            raise GraphValidationError(f"malformed rate entry {entry!r}") from None
        if key in rates:
            raise GraphValidationError(f"duplicate rate entry {key}")
        rates[key] = value
    laziness = doc.get("laziness") or {}
    scheme = make_scheme(graph, rates, laziness, tol=tol)
    return scheme, degeneracy(scheme)


def read_document(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise GraphValidationError(f"{path}: invalid JSON ({exc})") from None


def read_scheme(path) -> WeightingScheme:
    return load_document(read_document(path))[0]


def read_graph(path) -> MixedGraph:
    return graph_from_document(read_document(path))


def graph_to_document(graph: MixedGraph) -> dict:
    two, one = graph.sorted_edges()
    return {
        "vertices": list(graph.vertices),
        "two_sided_edges": [list(e) for e in two],
        "one_sided_edges": [list(e) for e in one],
    }


def scheme_to_document(scheme: WeightingScheme) -> dict:
    """Serialize a scheme; floats keep full precision (``repr`` round-trip)."""
    doc = graph_to_document(scheme.graph)
    v = scheme.vertices
    p = scheme.rates
    doc["rates"] = [
        {"from": v[i], "to": v[j], "p": float(p[i, j])}
        for i in range(scheme.n) for j in range(scheme.n)
        if i != j and p[i, j] != 0.0
    ]
    doc["laziness"] = {v[i]: float(p[i, i]) for i in range(scheme.n)}
    return doc


def write_scheme(scheme: WeightingScheme, path) -> None:
    Path(path).write_text(json.dumps(scheme_to_document(scheme), indent=2) + "\n", encoding="utf-8")
