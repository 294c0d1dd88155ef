import itertools
import random

import pytest

import oracle_lib as O
from hhslab import words as W


@pytest.fixture(scope="module")
def pentagon(graphs):
    return graphs["pentagon"]


@pytest.fixture(scope="module")
def f2(graphs):
    return graphs["f2"]


def gens(graph):
    out = []
    for v in range(graph.size):
        out.append(W.generator(graph, v, 1))
        if graph.orders[v] == 0:
            out.append(W.generator(graph, v, -1))
    return out


def test_pentagon_relator_collapses(pentagon):
    a, b = W.generator(pentagon, "a"), W.generator(pentagon, "b")
    assert (a * b * a * b).is_identity()


def test_pentagon_ac_no_reduction(pentagon, golden):
    a, c = W.generator(pentagon, "a"), W.generator(pentagon, "c")
    assert (a * c).length == golden["pentagon-ac-length"]["value"] == 2


def test_f2_free_reduction(f2):
    x = W.generator(f2, "x")
    assert (x * x).syllables == ((0, 2),)
    assert (x * x).length == 2
    assert (x * ~x).is_identity()


def test_involution_law(graphs):
    for graph in graphs.values():
        for v in range(graph.size):
            if graph.orders[v] == 2:
                g = W.generator(graph, v)
                assert (g * g).is_identity()


def all_letter_words(graph, length):
    alphabet = [(v, 1) for v in range(graph.size)]
    alphabet += [(v, -1) for v in range(graph.size) if graph.orders[v] == 0]
    return itertools.product(alphabet, repeat=length)


def fold_word(graph, letters, order):
    """Multiply the letters together in the bracketing encoded by `order`
    (a permutation of merge positions)."""
    parts = [W.generator(graph, v, e) for v, e in letters]
    positions = list(order)
    while len(parts) > 1:
        i = positions.pop(0) % (len(parts) - 1)
        parts[i : i + 2] = [parts[i] * parts[i + 1]]
    return parts[0]


def test_normal_form_confluence(pentagon):
    """Every bracketing of a letter-by-letter product gives the same word."""
    rnd = random.Random(7)
    words = list(all_letter_words(pentagon, 3))
    sampled6 = [
        tuple(rnd.choice(list(all_letter_words(pentagon, 1)))[0] for _ in range(6))
        for _ in range(60)
    ]
    for letters in words + sampled6:
        reference = fold_word(pentagon, letters, [0] * len(letters))
        for _ in range(4):
            order = [rnd.randrange(100) for _ in letters]
            assert fold_word(pentagon, letters, order) == reference


def test_canonical_is_shortlex_least(pentagon):
    """The stored form is the lexicographically least in its rewriting class."""
    rnd = random.Random(3)
    for _ in range(80):
        letters = [(rnd.randrange(5), 1) for _ in range(rnd.randrange(1, 6))]
        w = W.from_letters(pentagon, letters)
        cls = O.rewrite_class(pentagon, letters, max_len=len(letters))
        shortest = [u for u in cls if len(u) == min(len(x) for x in cls)]
        best = min(shortest, key=lambda u: [v for v, _ in u])
        assert tuple(w.syllables) == best


def test_associativity_inverse_power(pentagon, f2):
    rnd = random.Random(11)
    for graph in (pentagon, f2):
        pool = gens(graph)
        for _ in range(60):
            x = W.from_letters(graph, [rnd.choice(pool).syllables[0] for _ in range(4)])
            y = W.from_letters(graph, [rnd.choice(pool).syllables[0] for _ in range(3)])
            z = W.from_letters(graph, [rnd.choice(pool).syllables[0] for _ in range(3)])
            assert (x * y) * z == x * (y * z)
            assert (x * ~x).is_identity()
            assert x ** 3 == x * x * x
            assert x ** -2 == ~(x * x)
            assert W.distance(x, y) == ((~x) * y).length


def test_triangle_inequality_and_symmetry(pentagon):
    rnd = random.Random(5)
    pool = gens(pentagon)
    pts = [
        W.from_letters(pentagon, [rnd.choice(pool).syllables[0] for _ in range(5)])
        for _ in range(12)
    ]
    for x, y, z in itertools.combinations(pts, 3):
        assert W.distance(x, y) == W.distance(y, x)
        assert W.distance(x, z) <= W.distance(x, y) + W.distance(y, z)


def test_split_prefix_properties(pentagon):
    rnd = random.Random(13)
    pool = gens(pentagon)
    masks = [pentagon.mask_of("ac"), pentagon.mask_of("abc"), pentagon.mask_of("b")]
    for _ in range(80):
        w = W.from_letters(pentagon, [rnd.choice(pool).syllables[0] for _ in range(6)])
        for mask in masks:
            prefix, rest = W.split_prefix(w, mask)
            assert prefix * rest == w
            assert not prefix.support & ~mask
            assert prefix.length + rest.length == w.length
            again, _ = W.split_prefix(rest, mask)
            assert again.is_identity()  # maximality


def test_coset_minrep_minimal(pentagon):
    ball = __import__("hhslab.balls", fromlist=["ball"]).ball(pentagon, 3)
    mask = pentagon.mask_of("ac")
    for g in ball.elements:
        rep = W.coset_minrep(g, mask)
        assert W.in_coset(g, rep, mask)
        members = [h for h in ball.elements if W.in_coset(h, rep, mask)]
        assert rep.length == min(m.length for m in members)


def test_parse_word_formats(pentagon, f2):
    assert str(W.parse_word(pentagon, "acac")) == "acac"
    assert W.parse_word(pentagon, "1").is_identity()
    w = W.parse_word(f2, "x.y'.x")
    assert w.syllables == ((0, 1), (1, -1), (0, 1))
    assert W.parse_word(f2, "xx'").is_identity()
    with pytest.raises(KeyError):
        W.parse_word(pentagon, "q")


def test_str_roundtrip(pentagon):
    w = W.parse_word(pentagon, "acacd")
    assert W.parse_word(pentagon, str(w)) == w
