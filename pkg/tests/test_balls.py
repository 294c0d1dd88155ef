import numpy as np
import pytest

import oracle_lib as O
from conftest import shared_ball
from hhslab import kernels
from hhslab import words as W
from hhslab.balls import (
    ParabolicCoset,
    ResourceBudgetError,
    ball,
    growth_sphere_sizes,
    random_word,
)


def test_pentagon_radius_one(graphs):
    b = shared_ball(graphs, "pentagon", 1)
    assert len(b) == 6
    assert b.sphere_sizes() == [1, 5]


def test_pentagon_radius_two_matches_naive_oracle(graphs, golden):
    b = shared_ball(graphs, "pentagon", 2)
    sphere2 = golden["pentagon-sphere2"]["value"]
    assert b.sphere_sizes() == [1, 5, sphere2]
    assert len(b) == 1 + 5 + sphere2
    assert len(O.dedup_two_letter_products(graphs["pentagon"])) == sphere2


def test_finite_group_saturates(graphs):
    b = ball(graphs["clique3"], 10)
    assert len(b) == 8


def test_growth_series_cross_check(graphs):
    for name, radius in (("pentagon", 6), ("square", 6), ("f2", 5), ("clique3", 4)):
        b = shared_ball(graphs, name, radius) if radius >= 4 else ball(graphs[name], radius)
        assert b.sphere_sizes() == growth_sphere_sizes(graphs[name], radius)


def test_metric_correctness_radius_four(graphs):
    """BFS distance in the ball graph equals the normal-form length for all
    pairs (the ball is metrically exact, not just near the center)."""
    b = shared_ball(graphs, "pentagon", 4)
    dmat = kernels.all_pairs_distances(b.indptr, b.indices)
    for i in range(0, len(b), 7):
        for j in range(0, len(b), 11):
            assert dmat[i, j] == W.distance(b.elements[i], b.elements[j])


def test_ball_budget_error(graphs):
    with pytest.raises(ResourceBudgetError) as err:
        ball(graphs["pentagon"], 6, max_elements=100)
    assert err.value.count > 100


def test_gate_idempotent_on_coset(graphs):
    pent = graphs["pentagon"]
    coset = ParabolicCoset.through(W.identity(pent), pent.mask_of("ac"))
    x = W.parse_word(pent, "caca")
    assert coset.contains(x)
    assert coset.gate(x) == x


def test_gate_examples_against_brute_force(graphs, golden):
    pent = graphs["pentagon"]
    b = shared_ball(graphs, "pentagon", 4)
    coset = ParabolicCoset.through(W.identity(pent), pent.mask_of("ac"))
    gate_d = coset.gate(W.parse_word(pent, "d"))
    gate_acd = coset.gate(W.parse_word(pent, "acd"))
    assert str(gate_d) == golden["pentagon-gate-d"]["value"] == "1"
    assert str(gate_acd) == golden["pentagon-gate-acd"]["value"] == "ac"
    assert gate_d == O.brute_gate(b, coset.base, coset.mask, W.parse_word(pent, "d"))
    assert gate_acd == O.brute_gate(b, coset.base, coset.mask, W.parse_word(pent, "acd"))


def test_gate_convexity(graphs):
    """d(x, q) = d(x, gate) + d(gate, q) exactly, for every coset point q."""
    pent = graphs["pentagon"]
    b = shared_ball(graphs, "pentagon", 4)
    rng = np.random.default_rng(1)
    masks = [pent.mask_of("ac"), pent.mask_of("abc"), pent.mask_of("b")]
    for _ in range(25):
        x = b.elements[int(rng.integers(0, len(b)))]
        base = b.elements[int(rng.integers(0, len(b)))]
        mask = masks[int(rng.integers(0, len(masks)))]
        coset = ParabolicCoset.through(base, mask)
        gate = coset.gate(x)
        for q in coset.elements_in(b)[:20]:
            assert W.distance(x, q) == W.distance(x, gate) + W.distance(gate, q)


def test_random_word_zero_steps(graphs):
    assert random_word(graphs["pentagon"], 0, seed=5).is_identity()


def test_random_word_deterministic(graphs):
    w1 = random_word(graphs["pentagon"], 10, seed=123)
    w2 = random_word(graphs["pentagon"], 10, seed=123)
    assert w1 == w2


def test_random_word_seed_sensitivity(graphs):
    distinct = 0
    for t in range(100):
        a = random_word(graphs["pentagon"], 10, seed=2 * t)
        b = random_word(graphs["pentagon"], 10, seed=2 * t + 1)
        if a != b:
            distinct += 1
    assert distinct > 90


def test_certified_distances(graphs):
    b = shared_ball(graphs, "pentagon", 4)
    x = W.parse_word(graphs["pentagon"], "abcd")
    y = W.parse_word(graphs["pentagon"], "dcba")
    assert b.distance(x, y) == W.distance(x, y)
    far = W.parse_word(graphs["pentagon"], "adadad")
    assert not b.certified(far, x)  # not even in the ball
    assert b.certified(x, b.identity)
