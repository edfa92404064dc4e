"""Standard test topologies and random weighting schemes.

Topologies come from networkx and are relabelled to string ids ``"0", "1", ...``
in networkx node order.
"""

from __future__ import annotations

import itertools

import networkx as nx
import numpy as np

from .errors import GraphValidationError
from .graph import MixedGraph, WeightingScheme, make_scheme


def from_networkx(g) -> MixedGraph:
    """Convert a networkx graph; a DiGraph's reciprocal arcs become two-sided edges."""
    nodes = list(g.nodes)
    label = {v: str(i) for i, v in enumerate(nodes)}
    names = [label[v] for v in nodes]
    if not g.is_directed():
        return MixedGraph.build(names, [(label[a], label[b]) for a, b in g.edges if a != b])
    two, one = [], []
    for a, b in g.edges:
        if a == b:
            continue
        if g.has_edge(b, a):
            if nodes.index(a) < nodes.index(b):
                two.append((label[a], label[b]))
        else:
            one.append((label[a], label[b]))
    return MixedGraph.build(names, two, one)


def complete_graph(n: int) -> MixedGraph:
    return from_networkx(nx.complete_graph(n))


def path_graph(n: int) -> MixedGraph:
    """Path on ``n`` vertices (length n - 1)."""
    return from_networkx(nx.path_graph(n))


def cycle_graph(n: int) -> MixedGraph:
    return from_networkx(nx.cycle_graph(n))


def star_graph(leaves: int) -> MixedGraph:
    """Centre ``"0"`` joined to ``leaves`` leaves."""
    return from_networkx(nx.star_graph(leaves))


def hypercube(d: int) -> MixedGraph:
    return from_networkx(nx.hypercube_graph(d))


def petersen() -> MixedGraph:
    return from_networkx(nx.petersen_graph())


def regular_tree(degree: int, depth: int) -> MixedGraph:
    """Ball of radius ``depth`` in the ``degree``-regular tree, rooted at ``"0"``."""
    g = nx.Graph()
    g.add_node(0)
    frontier, nxt = [0], 1
    for level in range(depth):
        new = []
        for v in frontier:
            for _ in range(degree if level == 0 else degree - 1):
                g.add_edge(v, nxt)
                new.append(nxt)
                nxt += 1
        frontier = new
    return from_networkx(g)


def random_tree(n: int, rng: np.random.Generator) -> MixedGraph:
    return from_networkx(nx.random_labeled_tree(n, seed=int(rng.integers(2**31))))


def random_connected_graph(n: int, rng: np.random.Generator, edge_prob: float = 0.4,
                           one_sided_prob: float = 0.0) -> MixedGraph:
    """Random spanning tree plus extra pairs with probability ``edge_prob``.

    Each extra pair becomes a one-sided edge with probability ``one_sided_prob``;
    tree edges are always two-sided, so the result is strongly connected.
    """
    tree = nx.random_labeled_tree(n, seed=int(rng.integers(2**31))) if n > 1 else nx.empty_graph(1)
    v = [str(i) for i in range(n)]
    two = {tuple(sorted((a, b))) for a, b in tree.edges}
    one = []
    for a, b in itertools.combinations(range(n), 2):
        if (a, b) in two or rng.random() >= edge_prob:
            continue
        if rng.random() < one_sided_prob:
            one.append((v[a], v[b]) if rng.random() < 0.5 else (v[b], v[a]))
        else:
            two.add((a, b))
    return MixedGraph.build(v, [(v[a], v[b]) for a, b in sorted(two)], one)


def random_scheme(graph: MixedGraph, rng: np.random.Generator, lazy_prob: float = 0.0,
                  max_laziness: float = 0.5) -> WeightingScheme:
    """Non-degenerate random Markovian scheme with Dirichlet rows.

    A vertex gets laziness uniform in ``[0, max_laziness)`` with probability
    ``lazy_prob``; sinks get laziness 1.
    """
    n = graph.n
    p = np.zeros((n, n))
    for i in range(n):
        nb = graph.out_neighbors(i)
        if len(nb) == 0:
            p[i, i] = 1.0
            continue
        lazy = rng.uniform(0, max_laziness) if rng.random() < lazy_prob else 0.0
        w = rng.dirichlet(np.ones(len(nb)))
        w = np.maximum(w, 1e-3)
        p[i, nb] = (1.0 - lazy) * w / w.sum()
        p[i, i] = lazy
    p /= p.sum(axis=1, keepdims=True)
    return make_scheme(graph, p)


def require_connected(graph: MixedGraph) -> None:
    if not graph.is_unmixed:
        raise GraphValidationError("expected an unmixed graph")
    g = nx.Graph()
    g.add_nodes_from(graph.vertices)
    g.add_edges_from(graph.two_sided_edges)
    if graph.n and not nx.is_connected(g):
        raise GraphValidationError("graph is not connected")
