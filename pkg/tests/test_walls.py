import numpy as np
import pytest

import oracle_lib as O
from conftest import shared_ball
from hhslab import coned as C
from hhslab import walls as WL
from hhslab import words as W
from hhslab.balls import ball
from hhslab.graphs import parse_graph


def wall_through(walls, graph, label, base):
    for w in walls:
        if graph.names[w.label] == label and w.key.base == base:
            return w
    raise AssertionError("wall not found")


def test_every_edge_in_exactly_one_wall(graphs):
    for name in ("pentagon", "square", "f2"):
        b = shared_ball(graphs, name, 4)
        ws = WL.walls(b)
        assert sum(len(w.dual_edges) for w in ws) == len(b.edges)


def test_pentagon_carrier_in_star_coset(graphs):
    pent = graphs["pentagon"]
    b = shared_ball(graphs, "pentagon", 3)
    ws = WL.walls(b)
    jb = wall_through(ws, pent, "b", W.identity(pent))
    star_b = pent.star(pent.mask_of("b"))
    for vtx in WL.wall_carrier(jb, b):
        assert W.in_coset(b.elements[vtx], W.identity(pent), star_b)


def test_single_involution_one_wall():
    g = parse_graph("vertices: a:2\nedges:")
    b = ball(g, 1)
    ws = WL.walls(b)
    assert len(ws) == 1 and len(ws[0].dual_edges) == 1


def test_f2_every_edge_its_own_wall(graphs, golden):
    assert golden["f2-r3-walls-singletons"]["value"] is True
    b = shared_ball(graphs, "f2", 2)
    ws = WL.walls(b, certify=True)
    assert all(len(w.dual_edges) == 1 for w in ws)
    assert len(ws) == len(b.edges)


def test_pentagon_wall_stabilizer_is_parabolic(graphs):
    pent = graphs["pentagon"]
    b = shared_ball(graphs, "pentagon", 4)
    jb = wall_through(WL.walls(b), pent, "b", W.identity(pent))
    stab = WL.wall_stabilizer(jb, b)
    star_b = pent.star(pent.mask_of("b"))
    expected = [g for g in b.elements if not (g.support & ~star_b)]
    assert stab == expected


def test_f2_wall_stabilizer_trivial(graphs):
    f2 = graphs["f2"]
    b = shared_ball(graphs, "f2", 3)
    wx = wall_through(WL.walls(b), f2, "x", W.identity(f2))
    stab = WL.wall_stabilizer(wx, b)
    assert stab == [W.identity(f2)]
    # orbit-check oracle: the identity fixes every dual edge setwise
    moved, inside = WL.wall_orbit_check(wx, b, W.identity(f2))
    assert moved == 0 and inside == len(wx.dual_edges)


def test_stabilizer_elements_fix_wall_setwise(graphs):
    pent = graphs["pentagon"]
    b = shared_ball(graphs, "pentagon", 4)
    jb = wall_through(WL.walls(b), pent, "b", W.identity(pent))
    for g in WL.wall_stabilizer(jb, b)[:8]:
        moved, inside = WL.wall_orbit_check(jb, b, g)
        assert moved == 0
        assert inside > 0


def test_carrier_coset_law(graphs):
    """The computed stabilizer equals ball intersected with the conjugated
    star parabolic, for walls at shifted keys too."""
    pent = graphs["pentagon"]
    b = shared_ball(graphs, "pentagon", 4)
    ws = WL.walls(b)
    count = 0
    for w in ws:
        if pent.orders[w.label] != 2 or w.key.base.length > 1:
            continue
        conj = w.key.base
        star = pent.star(1 << w.label)
        expected = [
            g
            for g in b.elements
            if not (((~conj) * g * conj).support & ~star)
        ]
        assert WL.wall_stabilizer(w, b) == expected
        count += 1
    assert count >= 6


def test_wall_count_equals_distance(graphs):
    pent = graphs["pentagon"]
    b = shared_ball(graphs, "pentagon", 3)
    rng = np.random.default_rng(4)
    for _ in range(150):
        x = b.elements[int(rng.integers(0, len(b)))]
        y = b.elements[int(rng.integers(0, len(b)))]
        assert len(WL.walls_separating(x, y, pent)) == W.distance(x, y)


def test_equivariance_of_wall_keys(graphs):
    """Translating an interior wall by a generator lands on the wall with the
    translated key."""
    pent = graphs["pentagon"]
    b = shared_ball(graphs, "pentagon", 4)
    ws = WL.walls(b)
    by_key = {(w.label, w.key.base): w for w in ws}
    for s in range(pent.size):
        gen = W.generator(pent, s)
        for w in ws:
            if w.key.base.length > 1:
                continue
            image_key = w.translated_key(gen)
            image = by_key.get((w.label, image_key))
            assert image is not None
            image_pairs = {
                frozenset((b.edges[e][0], b.edges[e][1])) for e in image.dual_edges
            }
            for eidx in w.dual_edges:
                i, j, _ = b.edges[eidx]
                gi = b.index.get(gen * b.elements[i])
                gj = b.index.get(gen * b.elements[j])
                if gi is None or gj is None:
                    continue
                assert frozenset((gi, gj)) in image_pairs


def test_contact_single_wall():
    g = parse_graph("vertices: a:2\nedges:")
    b = ball(g, 1)
    cg = WL.contact_graph(WL.walls(b), b)
    assert cg.n == 1
    assert len(cg.indices) == 0


def test_f2_contact_graph_delta_zero(graphs, golden):
    assert golden["f2-r3-contact-delta2"]["value"] == 0
    assert golden["f2-r4-contact-block-graph"]["value"] is True
    b = shared_ball(graphs, "f2", 4)
    cg = WL.contact_graph(WL.walls(b, certify=False), b)
    assert C.delta_zero_certificate(cg) == "block-graph"
    rep = C.estimate_delta(cg, seed=0)
    assert rep.value == 0
    assert rep.method == "exhaustive"


def test_pentagon_contact_quasi_tree_evidence(graphs):
    pent = graphs["pentagon"]
    b4 = shared_ball(graphs, "pentagon", 4)
    cg4 = WL.contact_graph(WL.walls(b4), b4)
    rep4 = C.estimate_delta(cg4, seed=0)
    assert rep4.method == "exhaustive"
    assert rep4.value <= 2.5
    b6 = shared_ball(graphs, "pentagon", 6)
    cg6 = WL.contact_graph(WL.walls(b6, certify=False), b6)
    rep6 = C.estimate_delta(cg6, seed=0)
    assert rep6.value <= 2.5


def test_crossing_implies_contact(graphs):
    b = shared_ball(graphs, "pentagon", 3)
    cg = WL.contact_graph(WL.walls(b), b)
    adjacency = set()
    for v in range(cg.n):
        for w in cg.indices[cg.indptr[v] : cg.indptr[v + 1]]:
            adjacency.add((min(v, int(w)), max(v, int(w))))
    assert cg.crossing <= adjacency
    assert len(cg.crossing) > 0
