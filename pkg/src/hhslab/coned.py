"""Coned-off and collapsed graphs over Cayley balls, and the graph-level
operations that run on them: hyperbolicity estimation, element
classification, acylindricity probes, and comparison of actions.

Two collapse modes: "cone" adds one cone vertex per coset (collapsed sets get
diameter 2, matching a coned-off space), "clique" adds edges inside each
coset (diameter 1, matching a Cayley graph with an enlarged generating set).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx
import numpy as np

from . import kernels
from . import words as W
from .balls import CayleyBall, word_sort_key


@dataclass(frozen=True)
class ConedGraph:
    kind: str  # e.g. "cayley", "top_space", "factor", "largest_action", "carrier_coned"
    ball: CayleyBall
    mode: str  # "cone" | "clique" | "none"
    collapsed: tuple  # ((mask, reason), ...) coset families that were collapsed
    cone_labels: tuple  # (mask, minrep word) per cone vertex, in build order
    indptr: np.ndarray
    indices: np.ndarray
    _rows: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def n_base(self):
        return len(self.ball.elements)

    @property
    def n(self):
        return len(self.indptr) - 1

    def node_of(self, word):
        return self.ball.index.get(word)

    def translate_node(self, node, g):
        if node >= self.n_base:
            mask, base = self.cone_labels[node - self.n_base]
            moved = W.coset_minrep(g * base, mask)
            return self._cone_index().get((mask, moved))
        return self.ball.index.get(g * self.ball.elements[node])

    def _cone_index(self):
        if "cone_index" not in self._rows:
            self._rows["cone_index"] = {
                lab: self.n_base + i for i, lab in enumerate(self.cone_labels)
            }
        return self._rows["cone_index"]

    def distances_from(self, node):
        row = self._rows.get(node)
        if row is None:
            row = kernels.bfs_distances(self.indptr, self.indices, node)
            self._rows[node] = row
        return row

    def distance(self, a, b):
        d = int(self.distances_from(a)[b])
        return d if d >= 0 else None

    def base_diameter(self):
        """Max distance over base vertices (exact, all sources)."""
        best = 0
        for v in range(self.n_base):
            row = self.distances_from(v)[: self.n_base]
            if (row < 0).any():
                return None
            best = max(best, int(row.max()))
        return best

    def same_as_ball(self):
        """True when no collapsing happened: vertex and edge sets match the ball."""
        if self.cone_labels or self.n != self.n_base:
            return False
        return len(self.indices) == 2 * len(self.ball.edges)


def build_coned(ball, collapse, mode, kind):
    """Collapse every coset of every (mask, reason) family over the ball."""
    assert mode in ("cone", "clique", "none")
    n_base = len(ball.elements)
    adjacency = [set() for _ in range(n_base)]
    for i, j, _ in ball.edges:
        adjacency[i].add(j)
        adjacency[j].add(i)
    cone_labels = []
    if mode != "none":
        for mask, _reason in collapse:
            groups = {}
            for idx, g in enumerate(ball.elements):
                groups.setdefault(W.coset_minrep(g, mask), []).append(idx)
            for rep in sorted(groups, key=word_sort_key):
                members = groups[rep]
                if mode == "clique":
                    for a in members:
                        for b in members:
                            if a != b:
                                adjacency[a].add(b)
                else:
                    cone = n_base + len(cone_labels)
                    cone_labels.append((mask, rep))
                    adjacency.append(set(members))
                    for a in members:
                        adjacency[a].add(cone)
    indptr = np.zeros(len(adjacency) + 1, dtype=np.int64)
    flat = []
    for i, nbrs in enumerate(adjacency):
        flat.extend(sorted(nbrs))
        indptr[i + 1] = len(flat)
    return ConedGraph(
        kind=kind,
        ball=ball,
        mode=mode if collapse else "none",
        collapsed=tuple(collapse),
        cone_labels=tuple(cone_labels),
        indptr=indptr,
        indices=np.asarray(flat, dtype=np.int64),
    )


def cayley_space(ball):
    return build_coned(ball, [], "none", "cayley")


def carrier_coned_space(ball):
    """The ball with every wall-carrier coset family collapsed (one family per
    vertex label); the coned model of the contact-graph action."""
    graph = ball.graph
    collapse = [
        (graph.star(1 << v), f"carrier:{graph.names[v]}") for v in range(graph.size)
    ]
    return build_coned(ball, collapse, "cone", "carrier_coned")


def _csr(space):
    return space.indptr, space.indices, len(space.indptr) - 1


@dataclass(frozen=True)
class DeltaReport:
    value: Fraction
    method: str  # "exhaustive" | "sampled" | "forest" | "block-graph"
    nodes: int
    quadruples: int

    def to_json(self):
        return {
            "delta": str(self.value),
            "method": self.method,
            "nodes": self.nodes,
            "quadruples": self.quadruples,
        }


def _as_nx(space):
    indptr, indices, n = _csr(space)
    g = nx.Graph()
    g.add_nodes_from(range(n))
    for v in range(n):
        for w in indices[indptr[v] : indptr[v + 1]]:
            if v < w:
                g.add_edge(v, int(w))
    return g


def delta_zero_certificate(space):
    """Exact certificates that every quadruple has four-point defect 0:
    a forest, or more generally a block graph (every 2-connected piece a
    clique).  Returns the certificate name or None."""
    g = _as_nx(space)
    if nx.is_forest(g):
        return "forest"
    for block in nx.biconnected_components(g):
        k = len(block)
        sub = g.subgraph(block)
        if sub.number_of_edges() != k * (k - 1) // 2:
            return None
    return "block-graph"


EXHAUSTIVE_LIMIT = 300
DENSE_LIMIT = 2500


def estimate_delta(space, samples=200_000, seed=0):
    """Max Gromov four-point defect over quadruples, as an exact Fraction.

    Exhaustive for graphs of at most EXHAUSTIVE_LIMIT vertices; seeded
    sampling beyond that (certified zero via block-graph structure when
    available).  Raises on disconnected graphs.
    """
    indptr, indices, n = _csr(space)
    if n == 0:
        raise ValueError("empty graph")
    reach = kernels.bfs_distances(indptr, indices, 0)
    if (reach < 0).any():
        raise ValueError("disconnected graph")
    if n <= EXHAUSTIVE_LIMIT:
        dist = kernels.all_pairs_distances(indptr, indices)
        defect2 = kernels.four_point_defect_max(dist)
        quads = n * (n - 1) * (n - 2) * (n - 3) // 24
        return DeltaReport(Fraction(defect2, 2), "exhaustive", n, quads)
    cert = delta_zero_certificate(space)
    if cert is not None:
        return DeltaReport(Fraction(0), cert, n, 0)
    if n <= DENSE_LIMIT:
        dist = kernels.all_pairs_distances(indptr, indices)
        quads = kernels.sample_quadruples(n, samples, seed)
        defect2 = kernels.four_point_defect_quads(dist, quads)
        return DeltaReport(Fraction(defect2, 2), "sampled", n, len(quads))
    rng = np.random.default_rng(seed)
    m = min(n, 700)
    nodes = np.sort(rng.choice(n, size=m, replace=False))
    rows = np.stack(
        [kernels.bfs_distances(indptr, indices, int(v))[nodes] for v in nodes]
    ).astype(np.int16)
    quads = kernels.sample_quadruples(m, samples, seed + 1)
    defect2 = kernels.four_point_defect_quads(rows, quads)
    return DeltaReport(Fraction(defect2, 2), "sampled", n, len(quads))


@dataclass(frozen=True)
class ElementClassification:
    element: str
    space: str
    verdict: str  # "elliptic" | "loxodromic" | "inconclusive"
    orbit_diameter: int
    translation_estimate: Fraction | None
    powers_used: int
    required_radius: int | None = None

    def to_json(self):
        return {
            "element": self.element,
            "space": self.space,
            "verdict": self.verdict,
            "orbit_diameter": self.orbit_diameter,
            "translation_estimate": None
            if self.translation_estimate is None
            else str(self.translation_estimate),
            "powers_used": self.powers_used,
            "required_radius": self.required_radius,
        }


TAU_MIN = Fraction(1, 4)
ELLIPTIC_FACTOR = 3


def _cone_diameter(space):
    if getattr(space, "mode", None) == "cone":
        return 2
    if getattr(space, "mode", None) == "clique":
        return 1
    return 1


def _orbit_distance(space, g, k, base):
    """d(base, g^k base) via translation invariance: both endpoints are pulled
    back into the ball by g^-floor(k/2).  None when out of reach."""
    f = k // 2
    left = g ** (-f)
    right = g ** (k - f)
    if isinstance(space, ConedGraph):
        a = space.node_of(left * space.ball.elements[base])
        b = space.node_of(right * space.ball.elements[base])
    else:  # contact graph: nodes are walls
        a = space.translate_node(base, left)
        b = space.translate_node(base, right)
    if a is None or b is None:
        return None
    return space.distance(a, b) if isinstance(space, ConedGraph) else _contact_distance(space, a, b)


def _contact_distance(space, a, b):
    row = getattr(space, "_rows", None)
    if row is None:
        object.__setattr__(space, "_rows", {})
        row = space._rows
    cached = row.get(a)
    if cached is None:
        cached = kernels.bfs_distances(space.indptr, space.indices, a)
        row[a] = cached
    d = int(cached[b])
    return d if d >= 0 else None


def default_contact_base(space, g):
    """A deterministic base wall: the first wall through the identity whose
    key is g-invariant, else the first wall through the identity."""
    first = None
    for i, wall in enumerate(space.walls):
        if wall.key.contains(space.ball.identity):
            if first is None:
                first = i
            if wall.translated_key(g) == wall.key.base:
                return i
    return first if first is not None else 0


def classify_element(space, g, N, base=None, tau_min=TAU_MIN):
    """Elliptic/loxodromic/inconclusive verdict for the left action of g.

    orbit_diameter is max over n <= N of d(base, g^n base); the translation
    estimate compares the largest two reachable powers.  Verdicts follow the
    thresholds: loxodromic needs estimate >= tau_min, elliptic needs orbit
    diameter <= 3 * cone diameter; anything else is inconclusive.
    """
    if g.is_identity():
        return ElementClassification(str(g), space.kind if isinstance(space, ConedGraph) else "contact", "elliptic", 0, Fraction(0), 0)
    if isinstance(space, ConedGraph):
        base_node = space.node_of(space.ball.identity) if base is None else base
        space_name = space.kind
    else:
        base_node = default_contact_base(space, g) if base is None else base
        space_name = "contact"
    dists = []
    n_eff = 0
    for k in range(1, N + 1):
        d = _orbit_distance(space, g, k, base_node)
        if d is None:
            break
        dists.append(d)
        n_eff = k
    radius = space.ball.radius
    if n_eff < 2:
        need = g.length * ((N + 1) // 2 + 1)
        return ElementClassification(
            str(g), space_name, "inconclusive", max(dists, default=0), None, n_eff,
            required_radius=max(need, radius + 1),
        )
    orbit_diameter = max(dists)
    m = (n_eff + 1) // 2
    estimate = Fraction(dists[n_eff - 1] - dists[m - 1], n_eff - m)
    b_max = ELLIPTIC_FACTOR * max(_cone_diameter(space), 1)
    monotone = all(dists[i] <= dists[i + 1] for i in range(len(dists) - 1))
    if estimate >= tau_min and monotone:
        verdict = "loxodromic"
    elif orbit_diameter <= b_max:
        verdict = "elliptic"
    else:
        verdict = "inconclusive"
    return ElementClassification(
        str(g), space_name, verdict, orbit_diameter, estimate, n_eff
    )


def acylindricity_probe(space, epsilon, seed=0, pair_budget=60, group_budget=None):
    """Witnessed (R, N) table: N(R) = max over sampled node pairs at distance
    >= R of the number of ball elements moving both endpoints by <= epsilon.
    Sampled evidence only; returns (R, N, table)."""
    ball = space.ball
    rng = np.random.default_rng(seed)
    interior = [
        i for i, g in enumerate(ball.elements) if g.length * 2 <= ball.radius
    ]
    if not interior:
        interior = [0]
    acting = list(ball.elements)
    if group_budget is not None and len(acting) > group_budget:
        keep = rng.choice(len(acting), size=group_budget, replace=False)
        acting = [acting[int(i)] for i in np.sort(keep)]
    xs = interior
    if len(xs) > 24:
        xs = [interior[int(i)] for i in np.sort(rng.choice(len(interior), 24, replace=False))]
    pairs = []
    for a in xs:
        for b in xs:
            if a < b:
                pairs.append((a, b))
    if len(pairs) > pair_budget:
        keep = np.sort(rng.choice(len(pairs), pair_budget, replace=False))
        pairs = [pairs[int(i)] for i in keep]
    move_cache = {}

    def count_small_movers(node):
        if node in move_cache:
            return move_cache[node]
        row = space.distances_from(node)
        movers = set()
        x = space.ball.elements[node]
        for gi, g in enumerate(acting):
            img = space.node_of(g * x)
            if img is not None and 0 <= row[img] <= epsilon:
                movers.add(gi)
        move_cache[node] = movers
        return movers

    table = {}
    for a, b in pairs:
        d = space.distance(a, b)
        if d is None:
            continue
        joint = len(count_small_movers(a) & count_small_movers(b))
        table[d] = max(table.get(d, 0), joint)
    if not table:
        raise ValueError("no pair at positive distance within ball")
    dists = sorted(table)
    # N(R) = max over pairs at distance >= R
    n_of_r = {}
    running = 0
    for d in reversed(dists):
        running = max(running, table[d])
        n_of_r[d] = running
    best_n = min(n_of_r.values())
    best_r = min(r for r, nn in n_of_r.items() if nn == best_n)
    return best_r, best_n, dict(sorted(n_of_r.items()))


def _bounded_in(space, mask, identity_row, slack=2):
    """Doubling test: is W_mask bounded in the space's metric?  The max
    distance reached by subgroup elements of full length must not exceed the
    half-length maximum by more than the slack (boundary crops make bounded
    sets creep by an additive constant; unbounded directions grow linearly)."""
    ball = space.ball
    full = 0
    half = 0
    for i, g in enumerate(ball.elements):
        if g.support & ~mask:
            continue
        d = int(identity_row[i])
        if d < 0:
            continue
        full = max(full, d)
        if 2 * g.length <= ball.radius:
            half = max(half, d)
    return full <= half + slack, full


def compare_actions(x_space, y_space, ball=None):
    """Order in the domination poset, witnessed at this radius.

    x <= y when every collapsed subgroup of y (an implicit generator set of
    the y-action) has saturated bounded length in x.  Returns a verdict in
    {"x<=y", "y<=x", "equivalent", "incomparable-at-radius"} plus the
    per-subgroup bounds.
    """
    ball = ball or x_space.ball
    assert x_space.ball is y_space.ball, "actions must live over the same ball"
    id_node_x = x_space.node_of(ball.identity)
    id_node_y = y_space.node_of(ball.identity)
    row_x = x_space.distances_from(id_node_x)
    row_y = y_space.distances_from(id_node_y)
    detail = {}
    x_le_y = True
    for mask, reason in y_space.collapsed:
        ok, bound = _bounded_in(x_space, mask, row_x)
        detail[f"y:{reason}"] = {"bounded_in_x": ok, "bound": bound}
        x_le_y = x_le_y and ok
    y_le_x = True
    for mask, reason in x_space.collapsed:
        ok, bound = _bounded_in(y_space, mask, row_y)
        detail[f"x:{reason}"] = {"bounded_in_y": ok, "bound": bound}
        y_le_x = y_le_x and ok
    if x_le_y and y_le_x:
        verdict = "equivalent"
    elif x_le_y:
        verdict = "x<=y"
    elif y_le_x:
        verdict = "y<=x"
    else:
        verdict = "incomparable-at-radius"
    return verdict, detail
