import json

import pytest

from hhslab.graphs import GraphFormatError, build_graph, parse_graph, parse_graph_json


PENTAGON = """
# pentagon
vertices: a:2 b:2 c:2 d:2 e:2
edges: a-b b-c c-d d-e e-a
"""


def test_pentagon_link_of_b():
    g = parse_graph(PENTAGON)
    assert g.subset_names(g.link(g.mask_of("b"))) == ("a", "c")
    assert g.subset_names(g.star(g.mask_of("b"))) == ("a", "b", "c")


def test_f2_presentation():
    g = parse_graph("vertices: x:inf y:inf\nedges:")
    assert g.orders == (0, 0)
    assert g.adj == (0, 0)


def test_empty_vertex_list_rejected():
    with pytest.raises(GraphFormatError, match="no generators"):
        parse_graph("edges: a-b")
    with pytest.raises(GraphFormatError, match="no generators"):
        parse_graph("vertices:")


@pytest.mark.parametrize(
    "text, message, line",
    [
        ("vertices: a:2 a:2", "duplicate vertex", 1),
        ("vertices: a:2\nedges: a-b", "not a vertex", 2),
        ("vertices: a:2\nedges: a-a", "loop edge", 2),
        ("vertices: a:3", "bad order token", 1),
        ("vertices: a:2\nwhat: now", "unrecognized line", 2),
        ("vertices: a", "lacks ':order'", 1),
    ],
)
def test_parse_errors_carry_line_numbers(text, message, line):
    with pytest.raises(GraphFormatError, match=message) as err:
        parse_graph(text)
    if err.value.line is not None:
        assert err.value.line == line


def test_json_mirror_roundtrip():
    g = parse_graph(PENTAGON)
    again = parse_graph_json(json.dumps(g.to_json()))
    assert again == g


def test_general_cyclic_orders_rejected_in_json():
    with pytest.raises(GraphFormatError, match="bad order token"):
        parse_graph_json({"vertices": [{"name": "a", "order": 5}], "edges": []})


def test_subset_operations():
    g = parse_graph("vertices: a:2 b:2 c:2 d:2\nedges: a-b b-c c-d d-a")
    ac = g.mask_of("ac")
    assert g.subset_names(g.link(ac)) == ("b", "d")
    assert g.is_clique(g.mask_of("ab"))
    assert not g.is_clique(ac)
    assert g.is_join(g.full_mask)  # the square is a join of its diagonals
    assert not g.is_join(ac)
    assert g.is_finite_parabolic(g.mask_of("ab"))
    assert not g.is_finite_parabolic(ac)


def test_induced_subgraph_keeps_orders():
    g = parse_graph("vertices: a:2 x:inf c:2\nedges: a-x x-c")
    sub = g.induced(g.mask_of(["a", "x"]))
    assert sub.names == ("a", "x")
    assert sub.orders == (2, 0)
    assert sub.adj == (2, 1)


def test_build_graph_direct():
    g = build_graph([("s1", 2), ("s2", 0)], [("s1", "s2")])
    assert g.orders == (2, 0)
    assert g.adj == (2, 1)
