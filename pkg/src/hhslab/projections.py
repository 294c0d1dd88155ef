"""Projections onto coned factor spaces, relative projections between
domains, and the factored-space constructions (per-domain factor graphs, the
restructured top space, the largest-action graph).

Every domain type A carries one factor space: the Cayley ball of W_A (taken
at twice the ambient radius, which is exactly deep enough to hold every
projection of a ball element) with all proper sub-cosets from the factor
family coned off.  Projection of x to a domain (A, key) gates x into the
product-region coset key*W_st(A) and reads off the W_A-coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass
from . import words as W
from .balls import ball as make_ball
from .coned import ConedGraph, build_coned, cayley_space
from .structure import NESTED, TRANSVERSE, StructureIndex

ORIGINAL = "original"
UNBOUNDED_PRODUCTS = "unbounded_products"


class FactorSpace:
    """The coned factor graph shared by all domains of one type.

    Proper factor groups are small, so the factor ball grows on demand to
    hold whatever projection is queried; growing preserves existing node ids
    (balls are ShortLex-sorted, so enlarging only appends elements).
    """

    GROW_CAP = 60_000

    def __init__(self, idx: StructureIndex, mask):
        graph = idx.graph
        self.mask = mask
        self.ambient = idx.ball
        self.full = mask == graph.full_mask
        if self.full:
            self.factor_graph = graph
            self.vertex_map = {v: v for v in range(graph.size)}
            self.radius = idx.ball.radius
            self._collapse = [
                (m, "subdomain") for m in idx.family if m != graph.full_mask
            ]
            self.factor_ball = idx.ball
            self.space = build_coned(idx.ball, self._collapse, "cone", "factor")
        else:
            self.factor_graph = graph.induced(mask)
            verts = graph.vertices(mask)
            self.vertex_map = {v: i for i, v in enumerate(verts)}
            self.radius = 2 * idx.ball.radius
            self._collapse = []
            for sub in idx.family:
                if sub != mask and sub & ~mask == 0:
                    remapped = 0
                    for v in graph.vertices(sub):
                        remapped |= 1 << self.vertex_map[v]
                    self._collapse.append((remapped, "subdomain"))
            self._build()

    def _build(self):
        self.factor_ball = make_ball(self.factor_graph, self.radius)
        self.space = build_coned(self.factor_ball, self._collapse, "cone", "factor")

    def _ensure(self, length):
        while length > self.radius:
            if self.full or len(self.factor_ball) * 3 > self.GROW_CAP:
                raise KeyError(f"factor window exceeded (length {length})")
            self.radius *= 2
            self._build()

    def node_of_factor_word(self, word):
        """Node for an element of W_mask given as an ambient-graph word."""
        if self.full:
            return self.factor_ball.index[word]
        self._ensure(word.length)
        remapped = [(self.vertex_map[v], e) for v, e in word.syllables]
        return self.factor_ball.index[W.from_letters(self.factor_graph, remapped)]

    def distance(self, a, b):
        return self.space.distance(a, b)

    def set_diameter(self, nodes):
        nodes = sorted(set(nodes))
        best = 0
        for a in nodes:
            row = self.space.distances_from(a)
            for b in nodes:
                d = int(row[b])
                if d > best:
                    best = d
        return best


class ProjectionTable:
    """Lazy cache of projections pi(U, x) and relative projections rho(U -> V).

    structure="original" uses the full family for the top space;
    structure="unbounded_products" uses the restructured top space (the
    ambient ball with collapse-set cosets coned) and requires restructure().
    """

    def __init__(self, idx: StructureIndex, structure=ORIGINAL):
        self.idx = idx
        self.structure = structure
        self._factor_spaces = {}
        self._pi = {}
        self._rho = {}
        self.xi_prime = 0  # running max of rho diameters (projection spread)
        if structure == UNBOUNDED_PRODUCTS:
            assert idx.kept_ids is not None, "restructure() the index first"
            self.domain_ids = idx.kept_ids
        else:
            self.domain_ids = tuple(range(len(idx.domains)))

    def factor_space(self, mask):
        fs = self._factor_spaces.get(mask)
        if fs is None:
            if mask == self.idx.graph.full_mask and self.structure == UNBOUNDED_PRODUCTS:
                fs = _TopSpaceAdapter(top_space(self.idx))
            else:
                fs = FactorSpace(self.idx, mask)
            self._factor_spaces[mask] = fs
        return fs

    def project(self, dom_id, x):
        """Node of the domain's factor space under the gate-then-read-off map."""
        key = (dom_id, x)
        node = self._pi.get(key)
        if node is not None:
            return node
        dom = self.idx.domains[dom_id]
        graph = self.idx.graph
        if dom.mask == graph.full_mask:
            node = self.factor_space(dom.mask).node_of_factor_word(x)
        else:
            h = (~dom.key) * x
            prefix, _ = W.split_prefix(h, graph.star(dom.mask))
            part = tuple(s for s in prefix.syllables if dom.mask >> s[0] & 1)
            factor_word = W.NormalWord(graph, part)
            node = self.factor_space(dom.mask).node_of_factor_word(factor_word)
        self._pi[key] = node
        return node

    def dist(self, dom_id, x, y):
        """d_U(x, y): coned factor-space distance between projections."""
        fs = self.factor_space(self.idx.domains[dom_id].mask)
        return fs.distance(self.project(dom_id, x), self.project(dom_id, y))

    def rho(self, u_id, v_id, sample_cap=24):
        """Relative projection of U into V's factor space: the image of U's
        product region, legal only for transverse or strictly nested pairs."""
        cached = self._rho.get((u_id, v_id))
        if cached is not None:
            return cached
        code = self.idx.relation(u_id, v_id)
        if code not in (TRANSVERSE, NESTED):
            raise ValueError(
                f"rho undefined for relation {code} (needs transverse or nested)"
            )
        positions = self.idx.realization_class(u_id)
        if len(positions) > sample_cap:
            stride = len(positions) / sample_cap
            positions = [positions[int(i * stride)] for i in range(sample_cap)]
        nodes = tuple(
            sorted(
                {
                    self.project(v_id, self.idx.ball.elements[pos])
                    for pos in positions
                }
            )
        )
        fs = self.factor_space(self.idx.domains[v_id].mask)
        diameter = fs.set_diameter(nodes)
        self.xi_prime = max(self.xi_prime, diameter)
        result = (nodes, diameter)
        self._rho[(u_id, v_id)] = result
        return result

    def dist_to_rho(self, v_id, x, rho_nodes):
        fs = self.factor_space(self.idx.domains[v_id].mask)
        px = self.project(v_id, x)
        row = fs.space.distances_from(px)
        return min(int(row[n]) for n in rho_nodes)


class _TopSpaceAdapter:
    """Presents the restructured top space with the FactorSpace interface."""

    def __init__(self, space: ConedGraph):
        self.space = space
        self.factor_ball = space.ball
        self.mask = space.ball.graph.full_mask

    def node_of_factor_word(self, word):
        return self.factor_ball.index[word]

    def distance(self, a, b):
        return self.space.distance(a, b)

    def set_diameter(self, nodes):
        nodes = sorted(set(nodes))
        best = 0
        for a in nodes:
            row = self.space.distances_from(a)
            for b in nodes:
                best = max(best, int(row[b]))
        return best


def factored_space(idx: StructureIndex, dom_id=None, structure=UNBOUNDED_PRODUCTS):
    """The coned space attached to a domain: the restructured top space for
    the maximal domain (or the fully factored one under structure="original"),
    the shared factor graph for proper domains."""
    if dom_id is None or dom_id == idx.top_id:
        if structure == UNBOUNDED_PRODUCTS:
            return top_space(idx)
        collapse = [(m, "subdomain") for m in idx.family if m != idx.graph.full_mask]
        return build_coned(idx.ball, collapse, "cone", "factored_full")
    return FactorSpace(idx, idx.domains[dom_id].mask).space


def top_space(idx: StructureIndex, over_ball=None):
    """The restructured top space: the ball with every coset of every
    collapse-set type coned off.  With an empty collapse set this is the
    Cayley ball itself (no cone vertices).  The collapse set is type-level,
    so the space can be realized over a larger ball than the index's
    (useful for long-range distance queries)."""
    assert idx.collapse_ids is not None, "restructure() the index first"
    graph = idx.graph
    ball = idx.ball if over_ball is None else over_ball
    collapse = [
        (mask, "collapse:" + ",".join(graph.subset_names(mask)))
        for mask in idx.collapse_masks()
    ]
    if not collapse:
        space = cayley_space(ball)
        return ConedGraph(
            kind="top_space",
            ball=space.ball,
            mode="none",
            collapsed=(),
            cone_labels=(),
            indptr=space.indptr,
            indices=space.indices,
        )
    return build_coned(ball, collapse, "cone", "top_space")


def largest_action_graph(idx: StructureIndex):
    """Cayley ball with, for each nest-maximal kept type below the top, every
    coset of the factor stabilizer W_st(A) collapsed by clique edges: the
    Cayley graph of the group with the enlarged generating set."""
    assert idx.kept_ids is not None, "restructure() the index first"
    graph = idx.graph
    proper = [m for m in idx.kept_masks() if m != graph.full_mask]
    maximal = [
        m for m in proper if not any(m != o and m & ~o == 0 for o in proper)
    ]
    collapse = [
        (graph.star(m), "stabilizer:" + ",".join(graph.subset_names(m)))
        for m in sorted(maximal)
    ]
    return build_coned(idx.ball, collapse, "clique", "largest_action")


def lipschitz_audit(table: ProjectionTable, dom_ids=None, edge_cap=4000):
    """Max factor-distance across ball edges: the coarse-Lipschitz constant
    witnessed for the projections (exact on the audited edges)."""
    idx = table.idx
    ball = idx.ball
    dom_ids = table.domain_ids if dom_ids is None else dom_ids
    edges = ball.edges[:edge_cap]
    worst = 0
    for dom_id in dom_ids:
        for i, j, _ in edges:
            d = table.dist(dom_id, ball.elements[i], ball.elements[j])
            if d is not None and d > worst:
                worst = d
    return worst
