import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polygrowth import graphs
from polygrowth.errors import BudgetExceeded, ConfigurationError, InputError
from polygrowth.graphs import Vertex, get_graph

import _oracles as oracle

CATALOG = list(graphs.CATALOG)


def test_square_lattice_neighbours():
    g = get_graph("Z2")
    nbrs = g.neighbors(g.root)
    assert sorted(v.offset for v in nbrs) == [(-1, 0), (0, -1), (0, 1), (1, 0)]
    assert nbrs == sorted(nbrs)


def test_ladder_root_has_degree_three():
    g = get_graph("L2")
    assert g.neighbors(g.root) == [Vertex(0, (-1,)), Vertex(0, (1,)), Vertex(1, (0,))]


def test_tree_root_neighbours():
    g = get_graph("T3")
    assert [v.word for v in g.neighbors(g.root)] == [(0,), (1,), (2,)]
    assert [v.word for v in g.neighbors(Vertex(0, (), (0, 1)))] == [(0,), (0, 1, 0), (0, 1, 2)]


@pytest.mark.parametrize("name", CATALOG)
def test_adjacency_is_symmetric_and_loop_free(name):
    g = get_graph(name)
    for v in graphs.ball_vertices(g, 4):
        nbrs = g.neighbors(v)
        assert v not in nbrs
        assert len(set(nbrs)) == len(nbrs)
        assert len(nbrs) <= g.max_degree
        for u in nbrs:
            assert v in g.neighbors(u)


@pytest.mark.parametrize("name", ["Z2", "hex", "sqoct", "L2", "L3", "Z3", "T3", "T3xZ"])
def test_neighbour_order_is_canonical(name):
    g = get_graph(name)
    for v in graphs.ball_vertices(g, 3):
        nbrs = g.neighbors(v)
        if not isinstance(g, graphs.RegularTree):
            assert nbrs == sorted(nbrs)


@pytest.mark.parametrize("name,expected", [("Z2", 4), ("hex", 3), ("sqoct", 3), ("L2", 3), ("L3", 3), ("T3", 3), ("T3xZ", 5)])
def test_root_degree(name, expected):
    g = get_graph(name)
    assert len(g.neighbors(g.root)) == expected


def test_regular_degrees_on_ball():
    for name, deg in [("Z2", 4), ("hex", 3), ("sqoct", 3), ("T3", 3), ("T4", 4), ("Z3", 6)]:
        g = get_graph(name)
        assert {len(g.neighbors(v)) for v in graphs.ball_vertices(g, 5)} == {deg}


@pytest.mark.parametrize("name,nbrs,to_vertex", [
    ("Z2", oracle.square_neighbours, oracle.square_vertex),
    ("L2", oracle.ladder_neighbours(2), oracle.ladder_vertex),
    ("L3", oracle.ladder_neighbours(3), oracle.ladder_vertex),
    ("hex", oracle.brick_neighbours, oracle.brick_vertex),
])
def test_lattice_matches_coordinate_model(name, nbrs, to_vertex):
    g = get_graph(name)
    pts = {(x, y) for x in range(-4, 5) for y in range(-4, 5)}
    if name.startswith("L"):
        pts = {(x, r) for x in range(-4, 5) for r in range(int(name[1]))}
    for p in pts:
        assert sorted(g.neighbors(to_vertex(p))) == sorted(to_vertex(q) for q in nbrs(p))


def test_ball_sizes_match_oracle():
    assert graphs.ball_size(get_graph("Z2"), 12).values() == oracle.ball_counts(oracle.square_neighbours, 12)
    assert graphs.ball_size(get_graph("hex"), 10).values() == oracle.ball_counts(oracle.brick_neighbours, 10)
    assert graphs.ball_size(get_graph("L3"), 10).values() == oracle.ball_counts(oracle.ladder_neighbours(3), 10)
    assert graphs.ball_size(get_graph("T3"), 9).values() == [oracle.tree_ball(3, n) for n in range(10)]


def test_square_lattice_ball_formula():
    series = graphs.ball_size(get_graph("Z2"), 12)
    assert all(series[n] == 2 * n * n + 2 * n + 1 for n in range(13))


def test_budget_is_enforced():
    with pytest.raises(BudgetExceeded):
        graphs.ball_size(get_graph("T3"), 12, budget=1000)


@pytest.mark.parametrize("name", ["Z2", "hex", "sqoct", "L2", "T3", "T3xZ"])
def test_distance_agrees_with_bfs_layers(name):
    g = get_graph(name)
    layers = graphs.bfs_layers(g, 4)
    for d, layer in enumerate(layers):
        for v in layer[:25]:
            assert graphs.graph_distance(g, g.root, v, 10) == d


def test_distance_cap_returns_none():
    g = get_graph("Z2")
    assert graphs.graph_distance(g, g.root, Vertex(0, (5, 5)), 9) is None
    assert graphs.graph_distance(g, g.root, Vertex(0, (5, 5)), 10) == 10


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=3, max_size=3))
def test_distance_triangle_inequality(points):
    g = get_graph("sqoct")
    a, b, c = (Vertex(abs(x) % 4, (x, y)) for x, y in points)
    ab = graphs.graph_distance(g, a, b, 64)
    bc = graphs.graph_distance(g, b, c, 64)
    ac = graphs.graph_distance(g, a, c, 64)
    assert ac <= ab + bc
    assert ab == graphs.graph_distance(g, b, a, 64)


@pytest.mark.parametrize("name", ["Z2", "hex", "sqoct", "L2", "L3", "Z3"])
def test_unit_translations_are_automorphisms(name):
    g = get_graph(name)
    for i in range(g.dimension):
        t = graphs.translation(tuple(int(i == j) for j in range(g.dimension)))
        for v in graphs.ball_vertices(g, 4):
            assert sorted(t(u) for u in g.neighbors(v)) == sorted(g.neighbors(t(v)))
            assert t.inverse(t(v)) == v


def test_translation_dimension_mismatch():
    t = graphs.translation((1, 0))
    with pytest.raises(ConfigurationError):
        t(Vertex(0, (1,)))


def test_bipartite_detection():
    for name in ["Z1", "Z2", "Z3", "hex", "sqoct", "L2", "L3", "T3", "T3xZ"]:
        assert get_graph(name).bipartite
    tri = graphs.PeriodicLattice("tri", 2, ["o"], [(0, 0, (1, 0)), (0, 0, (0, 1)), (0, 0, (1, 1))])
    assert not tri.bipartite


def test_lattice_rejects_bad_edges():
    with pytest.raises(InputError):
        graphs.PeriodicLattice("bad", 1, ["o"], [(0, 0, (0,))])
    with pytest.raises(InputError):
        graphs.PeriodicLattice("bad", 1, ["o"], [(0, 0, (1,)), (0, 0, (-1,))])
    with pytest.raises(InputError):
        graphs.PeriodicLattice("bad", 1, ["a", "b"], [(0, 0, (1,))])
    with pytest.raises(InputError):
        graphs.PeriodicLattice("bad", 1, ["o"], [(0, 2, (1,))])


@pytest.mark.parametrize("bad", [Vertex(0, (0,)), Vertex(3, (0, 0)), Vertex(0, (0, 0), (1,)), (1, 2)])
def test_malformed_vertices_rejected(bad):
    with pytest.raises(InputError):
        get_graph("Z2").neighbors(bad)


def test_tree_rejects_unreduced_words():
    with pytest.raises(InputError):
        get_graph("T3").neighbors(Vertex(0, (), (1, 1)))
    with pytest.raises(InputError):
        get_graph("T3").neighbors(Vertex(0, (), (3,)))


def test_unknown_graph():
    with pytest.raises(InputError):
        get_graph("Z7")


def test_lattice_file_round_trip(tmp_path):
    doc = {
        "name": "file-square",
        "dimension": 2,
        "cells": ["o"],
        "edges": [
            {"from_cell": 0, "to_cell": 0, "offset_delta": [1, 0]},
            {"from_cell": 0, "to_cell": 0, "offset_delta": [0, 1]},
        ],
        "height": {"direction": [1, 0], "cell_heights": [0], "label": "east", "rho": [0, 1]},
    }
    path = tmp_path / "sq.json"
    path.write_text(json.dumps(doc))
    g = get_graph(str(path))
    assert g.name == "file-square" and g.height_spec["label"] == "east"
    assert graphs.ball_size(g, 6).values() == graphs.ball_size(get_graph("Z2"), 6).values()


def test_lattice_file_schema_violation(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"name": "x", "dimension": 1, "cells": ["o"]}))
    with pytest.raises(InputError):
        get_graph(str(path))


def test_fingerprint_is_stable():
    assert get_graph("hex").fingerprint() == graphs.hexagonal().fingerprint()
    assert get_graph("hex").fingerprint() != get_graph("sqoct").fingerprint()


@pytest.mark.parametrize("name,text,expected", [
    ("Z2", "1,-2", Vertex(0, (1, -2))),
    ("sqoct", "c2:0,1", Vertex(2, (0, 1))),
    ("T3", "ab", Vertex(0, (), (0, 1))),
    ("T3xZ", "ca@3", Vertex(0, (3,), (2, 0))),
])
def test_parse_vertex(name, text, expected):
    assert graphs.parse_vertex(get_graph(name), text) == expected


def test_vertex_json_round_trip():
    for v in [Vertex(0, (1, 2)), Vertex(0, (), (2, 0, 1)), Vertex(0, (-3,), (1,))]:
        assert graphs.vertex_from_json(graphs.vertex_to_json(v)) == v


def test_orbit_representatives_start_at_root():
    g = get_graph("sqoct")
    reps = g.orbit_representatives()
    assert reps[0] == g.root and len(reps) == 4
