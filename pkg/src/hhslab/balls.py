"""Cayley balls, parabolic cosets, gates, and random walks.

Ball distances are certified by normal-form length, never read off a
truncated breadth-first search: d(g, h) = length(g^-1 h) is exact for any
two elements, and a pair is flagged certified when that length fits inside
the ball radius.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import words as W
from .graphs import DefiningGraph
from .words import NormalWord


class ResourceBudgetError(RuntimeError):
    """An enumeration outgrew its budget; carries the count reached."""

    def __init__(self, message, count):
        self.count = count
        super().__init__(f"{message} (reached {count})")


def word_sort_key(w):
    """ShortLex key on canonical forms: length first, then letter sequence."""
    return (w.length, tuple((v, 0 if e > 0 else 1) for v, e in w.letters()))


def generator_steps(graph):
    """Symmetric generator list in fixed order: v, then v^-1 for order-0 vertices."""
    steps = []
    for v in range(graph.size):
        steps.append((v, 1))
        if graph.orders[v] == 0:
            steps.append((v, -1))
    return steps


@dataclass(frozen=True)
class CayleyBall:
    graph: DefiningGraph
    radius: int
    elements: tuple  # NormalWords, ShortLex-sorted; identity first
    index: dict  # NormalWord -> position
    edges: tuple  # (i, j, v) with element[j] = element[i] * v
    indptr: np.ndarray  # CSR adjacency over element positions
    indices: np.ndarray

    def __len__(self):
        return len(self.elements)

    def __contains__(self, w):
        return w in self.index

    @property
    def identity(self):
        return self.elements[0]

    def sphere_sizes(self):
        sizes = [0] * (self.radius + 1)
        for g in self.elements:
            sizes[g.length] += 1
        return sizes

    def distance(self, x, y):
        """Exact word-metric distance; independent of the radius."""
        return W.distance(x, y)

    def certified(self, x, y):
        """True when a geodesic between x and y is certified to fit in the ball."""
        return x in self.index and y in self.index and W.distance(x, y) <= self.radius

    def interior(self, depth):
        """Elements with length <= radius - depth (safe from boundary truncation)."""
        return [g for g in self.elements if g.length <= self.radius - depth]


def ball(graph, radius, max_elements=2_000_000):
    """Enumerate the closed ball of the given radius around the identity.

    Deterministic: elements come out in ShortLex order regardless of
    traversal details.  Raises ResourceBudgetError past `max_elements`.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    steps = generator_steps(graph)
    ident = W.identity(graph)
    seen = {ident}
    sphere = [ident]
    for _ in range(radius):
        nxt = set()
        for g in sphere:
            for v, e in steps:
                h = g * W.generator(graph, v, e)
                if h.length == g.length + 1 and h not in seen:
                    nxt.add(h)
        if len(seen) + len(nxt) > max_elements:
            raise ResourceBudgetError("ball exceeds element budget", len(seen) + len(nxt))
        seen.update(nxt)
        sphere = sorted(nxt, key=word_sort_key)
        if not sphere:
            break
    elements = tuple(sorted(seen, key=word_sort_key))
    index = {g: i for i, g in enumerate(elements)}
    edges = []
    for i, g in enumerate(elements):
        for v in range(graph.size):
            h = g * W.generator(graph, v, 1)
            j = index.get(h)
            if j is None:
                continue
            if graph.orders[v] == 2 and j < i:
                continue  # the involution edge was already recorded from the other end
            edges.append((i, j, v))
    adjacency = [[] for _ in elements]
    for i, j, _ in edges:
        adjacency[i].append(j)
        adjacency[j].append(i)
    indptr = np.zeros(len(elements) + 1, dtype=np.int64)
    flat = []
    for i, nbrs in enumerate(adjacency):
        nbrs.sort()
        flat.extend(nbrs)
        indptr[i + 1] = len(flat)
    return CayleyBall(
        graph=graph,
        radius=radius,
        elements=elements,
        index=index,
        edges=tuple(edges),
        indptr=indptr,
        indices=np.asarray(flat, dtype=np.int64),
    )


def _series_mul(a, b, order):
    out = [Fraction(0)] * (order + 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            if i + j > order:
                break
            out[i + j] += ai * bj
    return out


def _series_inv(a, order):
    # power series inverse, a[0] != 0
    out = [Fraction(0)] * (order + 1)
    out[0] = 1 / a[0]
    for k in range(1, order + 1):
        acc = Fraction(0)
        for i in range(1, k + 1):
            acc += a[i] * out[k - i]
        out[k] = -acc / a[0]
    return out


def growth_sphere_sizes(graph, radius):
    """Sphere sizes from the rational growth series of the graph product.

    Uses the clique expansion 1/W(t) = sum over cliques of prod(-f_v/(1+f_v))
    with f_v the vertex-group growth minus one; exact in Fractions.
    """
    order = radius
    # f_v/(1+f_v) as a truncated series: t/(1+t) for order 2, 2t/(1+t) for order 0
    base = [Fraction(0)] * (order + 1)
    for k in range(1, order + 1):
        base[k] = Fraction((-1) ** (k + 1))
    per_vertex = []
    for v in range(graph.size):
        scale = 1 if graph.orders[v] == 2 else 2
        per_vertex.append([scale * c for c in base])
    inv = [Fraction(0)] * (order + 1)
    seen = {0}
    frontier = [0]
    inv[0] += 1
    while frontier:
        mask = frontier.pop()
        top = max(graph.vertices(mask)) if mask else -1
        for v in range(top + 1, graph.size):
            if mask & ~graph.adj[v]:
                continue
            new = mask | (1 << v)
            if new in seen:
                continue
            seen.add(new)
            frontier.append(new)
            term = [Fraction(1)] + [Fraction(0)] * order
            for u in graph.vertices(new):
                term = _series_mul(term, per_vertex[u], order)
            sign = (-1) ** bin(new).count("1")
            for k in range(order + 1):
                inv[k] += sign * term[k]
    series = _series_inv(inv, order)
    sizes = []
    for k in range(order + 1):
        assert series[k].denominator == 1
        sizes.append(int(series[k]))
    return sizes


@dataclass(frozen=True)
class ParabolicCoset:
    """A left coset base * W_mask, stored by its minimal-length representative."""

    base: NormalWord
    mask: int

    def __post_init__(self):
        assert W.coset_minrep(self.base, self.mask) == self.base, (
            "coset base must be the minimal representative"
        )

    @classmethod
    def through(cls, g, mask):
        return cls(base=W.coset_minrep(g, mask), mask=mask)

    def contains(self, x):
        return W.in_coset(x, self.base, self.mask)

    def gate(self, x):
        return W.gate(x, self.base, self.mask)

    def elements_in(self, ball_):
        return [g for g in ball_.elements if self.contains(g)]


def random_word(graph, steps, seed):
    """Normal form of an n-step simple random walk on the symmetric generators.

    Deterministic for a fixed seed; the walk never stays put (each step
    multiplies by a generator, which always moves).
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    rng = np.random.default_rng(seed)
    stepset = generator_steps(graph)
    w = W.identity(graph)
    for k in rng.integers(0, len(stepset), size=steps):
        v, e = stepset[int(k)]
        w = w * W.generator(graph, v, e)
    return w
