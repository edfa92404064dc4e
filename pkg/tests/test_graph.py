import json
import math

import numpy as np
import pytest

from curveflow.errors import GraphValidationError
from curveflow.generators import complete_graph, cycle_graph, path_graph
from curveflow.graph import (
    MixedGraph,
    degeneracy,
    distances,
    induced_subgraph,
    load_document,
    make_scheme,
    read_scheme,
    scheme_to_document,
    write_scheme,
)


def test_build_orders_two_sided_edges():
    g = MixedGraph.build("abc", [("b", "a"), ("c", "b")], [("a", "c")])
    assert g.two_sided_edges == {("a", "b"), ("b", "c")}
    assert g.adjacency[0, 2] and not g.adjacency[2, 0]
    assert not g.is_unmixed


@pytest.mark.parametrize(
    "two, one",
    [
        ([("a", "a")], []),
        ([("a", "x")], []),
        ([("a", "b"), ("b", "a")], []),
        ([("a", "b")], [("a", "b")]),
        ([], [("a", "b"), ("b", "a")]),
    ],
)
def test_build_rejects_bad_edges(two, one):
    with pytest.raises(GraphValidationError):
        MixedGraph.build("abc", two, one)


def test_duplicate_vertices_rejected():
    with pytest.raises(GraphValidationError):
        MixedGraph(("a", "a"))


def test_make_scheme_validation():
    g = path_graph(3)
    with pytest.raises(GraphValidationError, match="negative"):
        make_scheme(g, {("0", "1"): 1.0, ("1", "0"): 1.2, ("1", "2"): -0.2, ("2", "1"): 1.0})
    with pytest.raises(GraphValidationError, match="sums"):
        make_scheme(g, {("0", "1"): 0.9, ("1", "0"): 0.5, ("1", "2"): 0.5, ("2", "1"): 1.0})
    with pytest.raises(GraphValidationError, match="non-edge"):
        make_scheme(g, {("0", "2"): 1.0, ("1", "0"): 0.5, ("1", "2"): 0.5, ("2", "1"): 1.0})
    with pytest.raises(GraphValidationError, match="exceeds"):
        make_scheme(g, {("0", "1"): 1.5, ("1", "0"): 0.5, ("1", "2"): 0.5, ("2", "1"): 1.0})


def test_make_scheme_renormalizes_within_tolerance():
    g = complete_graph(3)
    p = np.full((3, 3), 0.5 + 1e-13)
    np.fill_diagonal(p, 0.0)
    s = make_scheme(g, p)
    assert s.row_sum_defect < 1e-15


def test_laziness_and_degree():
    g = path_graph(2)
    s = make_scheme(g, {("0", "1"): 0.25, ("1", "0"): 1.0}, laziness={"0": 0.75})
    assert s.laziness.tolist() == [0.75, 0.0]
    assert s.weighted_degree.tolist() == [0.25, 1.0]
    assert s.rate("0", "0") == 0.75


def test_rates_are_read_only():
    s = make_scheme(complete_graph(2), np.array([[0, 1.0], [1.0, 0]]))
    with pytest.raises(ValueError):
        s.rates[0, 1] = 0.5


def test_degeneracy_and_induced_subgraph():
    g = MixedGraph.build("abcd", [("a", "b"), ("b", "c"), ("c", "d")], [("d", "a")])
    p = {("a", "b"): 1.0, ("b", "a"): 0.0, ("b", "c"): 1.0, ("c", "b"): 0.5, ("c", "d"): 0.5,
         ("d", "a"): 0.0, ("d", "c"): 1.0}
    s = make_scheme(g, p)
    rep = degeneracy(s)
    assert rep.is_degenerate
    assert rep.degenerate_two_sided == {("a", "b")}
    assert rep.degenerate_one_sided == {("d", "a")}
    assert rep.degenerate_vertices == {"b", "d"}
    gp = induced_subgraph(s)
    assert gp.one_sided_edges == {("a", "b")}
    assert gp.two_sided_edges == {("b", "c"), ("c", "d")}
    assert gp.is_subgraph_of(g)
    assert not degeneracy(s.restricted_to_support()).is_degenerate


def test_distances_directed():
    g = MixedGraph.build("abc", [("a", "b")], [("b", "c")])
    s = make_scheme(g, {("a", "b"): 1.0, ("b", "a"): 0.0, ("b", "c"): 1.0}, laziness={"c": 1.0})
    d = distances(s, "c")
    assert d.d_G == {"a": math.inf, "b": math.inf, "c": 0}
    d = distances(s, "a")
    assert d.d_G == {"a": 0, "b": 1, "c": 2}
    assert d.d_P == {"a": 0, "b": 1, "c": 2}
    d = distances(s, "b")
    assert d.d_G["a"] == 1 and d.d_P["a"] == math.inf
    assert d.sphere(1) == ["a", "c"] and d.ball(1, "P") == ["b", "c"]


def test_document_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    g = cycle_graph(5)
    p = g.adjacency * rng.random((5, 5))
    p = 0.8 * p / p.sum(axis=1, keepdims=True)
    np.fill_diagonal(p, 0.2)
    s = make_scheme(g, p)
    path = tmp_path / "s.json"
    write_scheme(s, path)
    again = read_scheme(path)
    assert np.array_equal(again.rates, s.rates)
    assert again.graph == s.graph


@pytest.mark.parametrize(
    "doc",
    [
        {"two_sided_edges": []},
        {"vertices": ["a", "b"], "two_sided_edges": [["a"]]},
        {"vertices": ["a", "b"], "two_sided_edges": [["a", "b"]],
         "rates": [{"from": "a", "to": "b", "p": 1}, {"from": "a", "to": "b", "p": 1}]},
        {"vertices": ["a", "b"], "two_sided_edges": [["a", "b"]], "rates": [{"from": "a", "p": 1}]},
        {"vertices": ["a", "b"], "two_sided_edges": [["a", "b"]],
         "rates": [{"from": "a", "to": "b", "p": "nan"}, {"from": "b", "to": "a", "p": 1}]},
    ],
)
def test_load_document_rejects_malformed(doc):
    with pytest.raises(GraphValidationError):
        load_document(json.loads(json.dumps(doc)))


def test_load_document_reports_degeneracy():
    doc = scheme_to_document(make_scheme(path_graph(3), np.array([[0, 1, 0], [1, 0, 0], [0, 1, 0.]])))
    scheme, report = load_document(doc)
    assert report.degenerate_two_sided == {("1", "2")}
    assert scheme.rate("2", "1") == 1.0
