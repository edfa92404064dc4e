import networkx as nx
import numpy as np
import pytest

from curveflow.constructions import (
    clique_scheme,
    k3_catalog,
    nested_complete_scheme,
    simple_random_walk,
    triangle_free_solve,
)
from curveflow.curvature import curvature
from curveflow.errors import GraphValidationError, InfeasibleConstructionError
from curveflow.flow import flow_rhs
from curveflow.generators import (
    complete_graph,
    cycle_graph,
    from_networkx,
    hypercube,
    path_graph,
    petersen,
    random_connected_graph,
    random_tree,
    star_graph,
)
from curveflow.graph import MixedGraph, degeneracy, induced_subgraph
from curveflow.sharpness import complete_graph_defect, is_n_sharp, sharpness_all, sharpness_report


def assert_battery(scheme, tol=1e-10):
    reports = sharpness_all(scheme)
    assert reports
    for v, r in reports.items():
        assert r.residual_norm < tol
        assert r.sharp_via_q and r.sharp_via_m2
        assert np.all(np.abs(r.one_ball_residuals) < 1e-9)
        assert is_n_sharp(scheme, v, 2.0)


def weakly_connected(graph):
    g = nx.Graph()
    g.add_nodes_from(graph.vertices)
    g.add_edges_from(graph.two_sided_edges | graph.one_sided_edges)
    return nx.is_connected(g)


def test_srw_examples():
    s = simple_random_walk(complete_graph(5))
    off = ~np.eye(5, dtype=bool)
    assert np.allclose(s.rates[off], 0.25) and np.all(s.laziness == 0)
    s = simple_random_walk(hypercube(3))
    assert np.allclose(s.rates[s.graph.adjacency], 1 / 3)
    assert_battery(s)
    s = simple_random_walk(path_graph(4))
    assert s.rate("0", "1") == 1.0


def test_srw_rejects_sink():
    g = MixedGraph.build("ab", [], [("a", "b")])
    with pytest.raises(GraphValidationError, match="outgoing"):
        simple_random_walk(g)


def test_clique_on_path3():
    s = clique_scheme(path_graph(4), ["1", "2"])
    expected = np.zeros((4, 4))
    expected[0, 1] = expected[1, 2] = expected[2, 1] = expected[3, 2] = 1.0
    assert np.array_equal(s.rates, expected)
    assert_battery(s)


def test_clique_on_star():
    s = clique_scheme(star_graph(4), ["0", "2"])
    assert s.rate("0", "2") == 1.0 and s.rate("2", "0") == 1.0
    for leaf in "134":
        assert s.rate(leaf, "0") == 1.0
    assert_battery(s)


def test_clique_whole_k3_is_srw():
    s = clique_scheme(complete_graph(3), ["0", "1", "2"])
    assert np.allclose(s.rates, k3_catalog()[0].rates)


@pytest.mark.parametrize("graph, clique", [
    (petersen(), ["0", "1"]),
    (hypercube(3), ["0", "1"]),
    (complete_graph(5), ["0", "1", "2"]),
    (cycle_graph(7), ["3", "4"]),
])
def test_clique_scheme_sharp_and_weakly_connected(graph, clique):
    s = clique_scheme(graph, clique)
    assert_battery(s)
    assert weakly_connected(induced_subgraph(s))


def test_clique_scheme_on_random_graphs():
    rng = np.random.default_rng(21)
    for _ in range(15):
        g = random_connected_graph(int(rng.integers(3, 9)), rng)
        a = int(rng.integers(g.n))
        b = int(rng.choice(g.out_neighbors(a)))
        clique = [g.vertices[a], g.vertices[b]]
        # greedily grow the clique
        for c in range(g.n):
            idx = [g.index[v] for v in clique]
            if c not in idx and all(g.adjacency[c, i] for i in idx):
                clique.append(g.vertices[c])
        s = clique_scheme(g, clique)
        assert_battery(s)
        assert weakly_connected(induced_subgraph(s))


def test_clique_scheme_validation():
    with pytest.raises(GraphValidationError, match="not a clique"):
        clique_scheme(path_graph(4), ["0", "2"])
    with pytest.raises(GraphValidationError):
        clique_scheme(path_graph(4), ["0"])
    with pytest.raises(GraphValidationError):
        clique_scheme(path_graph(4), ["0", "9"])
    disconnected = MixedGraph.build("abcd", [("a", "b"), ("c", "d")])
    with pytest.raises(GraphValidationError):
        clique_scheme(disconnected, ["a", "b"])
    mixed = MixedGraph.build("abc", [("a", "b")], [("b", "c")])
    with pytest.raises(GraphValidationError):
        clique_scheme(mixed, ["a", "b"])


def test_hypercube_unique_third():
    sol = triangle_free_solve(hypercube(3))
    assert sol.unique and sol.kernel_dimension == 0
    assert np.allclose(sol.vector, 1 / 3, atol=1e-12)
    assert_battery(sol.scheme())


@pytest.mark.parametrize("d", [2, 4])
def test_even_hypercube_not_unique(d):
    sol = triangle_free_solve(hypercube(d))
    assert not sol.unique and sol.kernel_dimension >= 1


def test_square_solution_set():
    g = cycle_graph(4)
    sol = triangle_free_solve(g)
    assert not sol.unique and sol.kernel_dimension == 2
    a = g.adjacency.astype(float)
    assert np.allclose(a @ sol.kernel, 0, atol=1e-12)
    rng = np.random.default_rng(2)
    for c in [sol.vector, *sol.samples(10, rng)]:
        assert np.max(np.abs(a @ c - 1)) < 1e-10
        # opposite vertices of the square share a neighbourhood: c0 + c2 = c1 + c3 = 1
        assert c[0] + c[2] == pytest.approx(1) and c[1] + c[3] == pytest.approx(1)
        assert np.all(c > 0) and np.all(c <= 1 + 1e-12)
        assert_battery(sol.scheme(c))


def test_convexity_midpoints():
    rng = np.random.default_rng(3)
    for g in [cycle_graph(4), hypercube(2), from_networkx(nx.complete_bipartite_graph(2, 3)), cycle_graph(8)]:
        sol = triangle_free_solve(g)
        cs = [sol.vector, *sol.samples(6, rng)]
        a = g.adjacency.astype(float)
        for c, c2 in zip(cs, cs[1:]):
            mid = 0.5 * (c + c2)
            assert np.max(np.abs(a @ mid - 1)) < 1e-10
            assert_battery(sol.scheme(mid))


def test_infeasible_forced_zero():
    g = MixedGraph.build("0123", [("0", "2"), ("1", "2"), ("1", "3")])
    with pytest.raises(InfeasibleConstructionError) as err:
        triangle_free_solve(g)
    cert = err.value.certificate
    assert cert["kind"] == "positivity"
    assert cert["max_min_entry"] <= 1e-10
    assert "c_" in cert["violated"]


def test_path_certificates():
    # path on 4 vertices: the leaves force c1 = c2 = 1 and then c0 = 0
    with pytest.raises(InfeasibleConstructionError) as err:
        triangle_free_solve(path_graph(4))
    assert err.value.certificate["kind"] == "positivity"
    # path on 5 vertices: c1 = c3 = 1 contradicts c1 + c3 = 1
    with pytest.raises(InfeasibleConstructionError) as err:
        triangle_free_solve(path_graph(5))
    cert = err.value.certificate
    assert cert["kind"] == "inconsistent"
    y = np.array(cert["left_kernel_vector"])
    assert np.allclose(y @ path_graph(5).adjacency, 0, atol=1e-12) and abs(y.sum()) > 1e-6
    assert triangle_free_solve(cycle_graph(5)).unique


def test_triangle_free_rejects_triangles():
    with pytest.raises(GraphValidationError, match="triangle"):
        triangle_free_solve(complete_graph(3))


def test_leaf_obstruction_on_trees():
    rng = np.random.default_rng(4)
    checked = 0
    for _ in range(40):
        t = random_tree(int(rng.integers(4, 10)), rng)
        nxt = nx.Graph(list(t.two_sided_edges))
        if max(d for _, d in nxt.degree) == t.n - 1:
            continue
        checked += 1
        try:
            sol = triangle_free_solve(t)
        except InfeasibleConstructionError:
            continue
        s = sol.scheme()
        assert degeneracy(s).is_degenerate
    assert checked > 20


@pytest.mark.parametrize("leaves", [1, 2, 3, 6])
def test_star_solutions(leaves):
    sol = triangle_free_solve(star_graph(leaves))
    c = sol.vector
    assert c[0] == pytest.approx(1.0)
    assert c[1:].sum() == pytest.approx(1.0)
    assert sol.kernel_dimension == leaves - 1


def test_bipartite_odd_order_not_unique():
    rng = np.random.default_rng(6)
    feasible = 0
    graphs = [from_networkx(nx.complete_bipartite_graph(a, b)) for a, b in [(1, 2), (2, 3), (1, 4), (3, 4), (2, 5)]]
    for _ in range(60):
        n = int(rng.choice([5, 7, 9]))
        g = nx.bipartite.random_graph(n // 2, n - n // 2, 0.6, seed=int(rng.integers(2**31)))
        if nx.is_connected(g):
            graphs.append(from_networkx(g))
    for g in graphs:
        assert g.n % 2 == 1
        try:
            sol = triangle_free_solve(g)
        except InfeasibleConstructionError:
            continue
        feasible += 1
        assert sol.kernel_dimension >= 1 and not sol.unique
    assert feasible >= 5


def test_k3_catalog():
    cat = k3_catalog()
    assert len(cat) == 4
    expected = [(.5, .5, .5, .5, .5, .5), (0, 1, .5, .5, 1, 0), (.5, .5, 0, 1, 0, 1), (1, 0, 1, 0, .5, .5)]
    for s, row in zip(cat, expected):
        r = s.rates
        assert (r[0, 1], r[0, 2], r[1, 0], r[1, 2], r[2, 0], r[2, 1]) == row
        for v in range(3):
            assert sharpness_report(s, v).residual_norm < 1e-12
        assert np.max(np.abs(flow_rhs(s))) < 1e-12
    flags = [degeneracy(s).is_degenerate for s in cat]
    assert flags == [False, True, True, True]


def test_k3_catalog_curvature():
    # the simple random walk on K3 has K_inf = 5/4
    assert curvature(k3_catalog()[0], 0, float("inf")).value == pytest.approx(1.25, abs=1e-12)


@pytest.mark.parametrize("n, m", [(4, 2), (4, 3), (5, 3), (5, 4), (6, 2)])
def test_nested_complete(n, m):
    s = nested_complete_scheme(n, m)
    assert np.max(np.abs(complete_graph_defect(s))) < 1e-12
    assert_battery(s)
    assert degeneracy(s).is_degenerate == (m < n)


def test_nested_complete_validation():
    with pytest.raises(ValueError):
        nested_complete_scheme(3, 4)
    with pytest.raises(ValueError):
        nested_complete_scheme(3, 1)
