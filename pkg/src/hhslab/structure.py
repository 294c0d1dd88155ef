"""The coset-domain index of a graph product: parallelism classes of
parabolic cosets with their nesting / orthogonality / transversality
relations, exact boundedness classification, and the restructuring that
keeps only domains with unbounded product regions.

A domain is a pair (A, key): A is a vertex subset from the factor family and
key the minimal representative of a coset of W_st(A); two cosets g W_A and
h W_A are parallel exactly when they lie in the same W_st(A)-coset, so the
key identifies the parallelism class.  Relations are decided by ball-witness
search; the algebraic double-coset test separates "refuted" from
"undecidable within this ball" and must agree with the witness search
wherever both decide.
"""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from . import words as W
from .balls import CayleyBall, growth_sphere_sizes, word_sort_key
from .graphs import DefiningGraph


class UndecidableWithinBall(RuntimeError):
    """Neither a witness nor a refutation of a relation fits in the ball."""


class ResourceBudgetError(RuntimeError):
    pass


def factor_family(graph: DefiningGraph):
    """Closure under pairwise intersection of stars, links and singletons,
    together with the full vertex set; the empty set is excluded."""
    members = {graph.full_mask}
    for v in range(graph.size):
        bit = 1 << v
        members.add(bit)
        members.add(graph.star(bit))
        link = graph.link(bit)
        if link:
            members.add(link)
    changed = True
    while changed:
        changed = False
        current = sorted(members)
        for i, a in enumerate(current):
            for b in current[i + 1 :]:
                c = a & b
                if c and c not in members:
                    members.add(c)
                    changed = True
    return tuple(sorted(members, key=lambda m: (m.bit_count(), m)))


@dataclass(frozen=True)
class Domain:
    mask: int
    key: W.NormalWord

    @property
    def level(self):
        return self.mask.bit_count()

    def sort_key(self):
        return (self.level, self.mask, word_sort_key(self.key))

    def label(self, graph):
        return "{" + ",".join(graph.subset_names(self.mask)) + "}@" + str(self.key)


EQUAL = "equal"
NESTED = "nested"
CONTAINS = "contains"
ORTHOGONAL = "orthogonal"
TRANSVERSE = "transverse"


def classify_boundedness(graph, mask, crosscheck=True):
    """(F bounded, E bounded) for a domain type: the factor W_A is bounded iff
    A is a clique of involutions, the orthogonal complement iff lk(A) is.
    Cross-checked against ball-growth saturation for small types."""
    f_bounded = graph.is_finite_parabolic(mask)
    e_bounded = graph.is_finite_parabolic(graph.link(mask))
    if crosscheck and 0 < mask.bit_count() <= 4:
        assert f_bounded == _saturates(graph, mask)
    link = graph.link(mask)
    if crosscheck and 0 < link.bit_count() <= 4:
        assert e_bounded == _saturates(graph, link)
    return f_bounded, e_bounded


def _saturates(graph, mask):
    sub = graph.induced(mask)
    sizes = growth_sphere_sizes(sub, sub.size + 1)
    return sizes[-1] == 0


def factor_space_unbounded(graph, mask):
    """Whether the coned factor space of a type has infinite diameter: the
    parabolic must be infinite and its defining subgraph must not split as a
    join (a join is collapsed to bounded diameter by its sub-coset cones)."""
    return not graph.is_finite_parabolic(mask) and not graph.is_join(mask)


class StructureIndex:
    """All domains meeting a ball, with witnessed relations.

    Filled in two stages: construction builds the lattice, restructure() adds
    the unbounded-products data (kept / collapsed / removed domains and the
    verification results).  Treated as frozen once built.
    """

    def __init__(self, ball: CayleyBall, family, budget=200_000):
        self.ball = ball
        self.graph = ball.graph
        self.family = tuple(family)
        self._family_set = set(self.family)
        self.domain_of_element = {}  # mask -> list: ball position -> domain id
        domains = {}
        for mask in self.family:
            st = self.graph.star(mask)
            per_elem = []
            for g in ball.elements:
                key = W.coset_minrep(g, st)
                dom = Domain(mask, key)
                if dom not in domains and len(domains) >= budget:
                    raise ResourceBudgetError(f"domain budget exceeded ({len(domains)})")
                domains[dom] = None
                per_elem.append(dom)
            self.domain_of_element[mask] = per_elem
        self.domains = tuple(sorted(domains, key=Domain.sort_key))
        self.ids = {dom: i for i, dom in enumerate(self.domains)}
        for mask in self.family:
            self.domain_of_element[mask] = [
                self.ids[d] for d in self.domain_of_element[mask]
            ]
        self.boundedness = {
            mask: classify_boundedness(self.graph, mask) for mask in self.family
        }
        self._relations = {}
        self._witnessed = None
        # restructuring results; filled by restructure()
        self.kept_ids = None
        self.collapse_ids = None
        self.removed_ids = None
        self.max_orthogonal = None
        self.verification = None

    # -- basic queries ------------------------------------------------------

    @property
    def top(self):
        return Domain(self.graph.full_mask, W.identity(self.graph))

    @property
    def top_id(self):
        return self.ids[self.top]

    def domain_at(self, mask, element):
        """Id of the domain whose parallelism class holds element * W_mask."""
        key = W.coset_minrep(element, self.graph.star(mask))
        return self.ids.get(Domain(mask, key))

    def realization_class(self, dom_id):
        """Ball positions realizing the domain (its product region in the ball)."""
        mask = self.domains[dom_id].mask
        col = self.domain_of_element[mask]
        return [pos for pos, d in enumerate(col) if d == dom_id]

    def domains_through(self, pos):
        """One domain id per family type through the given ball position."""
        return [self.domain_of_element[mask][pos] for mask in self.family]

    # -- relations ----------------------------------------------------------

    def relation(self, i, j):
        """Relation code between domain ids; raises UndecidableWithinBall when
        no witness and no refutation fits in the ball."""
        if i == j:
            return EQUAL
        cached = self._relations.get((i, j))
        if cached is not None:
            return cached
        u, v = self.domains[i], self.domains[j]
        graph = self.graph
        candidate = None
        if u.mask & ~v.mask == 0 and u.mask != v.mask:
            candidate = NESTED
        elif v.mask & ~u.mask == 0 and u.mask != v.mask:
            candidate = CONTAINS
        elif v.mask & ~graph.link(u.mask) == 0:
            candidate = ORTHOGONAL
        if candidate is None:
            code = TRANSVERSE
        else:
            realized = bool(
                set(self.realization_class(i)) & set(self.realization_class(j))
            )
            meets = self._cosets_meet(u, v)
            if realized:
                assert meets, "ball witness found but the algebra refutes it"
                code = candidate
            elif meets:
                raise UndecidableWithinBall(
                    f"domains {i} and {j}: cosets meet beyond radius {self.ball.radius}"
                )
            else:
                code = TRANSVERSE
        self._relations[(i, j)] = code
        self._relations[(j, i)] = _flip(code)
        return code

    def _cosets_meet(self, u, v):
        """Exact test: key_u W_st(A_u) and key_v W_st(A_v) intersect; greedy
        alternating prefix/suffix stripping reaches the minimal double-coset
        representative."""
        h = (~u.key) * v.key
        c = self.graph.star(u.mask)
        d = self.graph.star(v.mask)
        while True:
            _, h1 = W.split_prefix(h, c)
            h2, _ = W.split_suffix(h1, d)
            if h2 == h:
                break
            h = h2
        return h.is_identity()

    def witnessed_relations(self):
        """All nesting and orthogonality relations witnessed inside the ball,
        as {(i, j): code} with i < j.  Every witnessed pair shares a ball
        element, so one sweep over elements finds them all; unlisted pairs
        are transverse or undecidable at this radius."""
        if self._witnessed is not None:
            return self._witnessed
        graph = self.graph
        fam = self.family
        links = {mask: graph.link(mask) for mask in fam}
        out = {}
        for pos in range(len(self.ball.elements)):
            here = [self.domain_of_element[mask][pos] for mask in fam]
            for a, mask_a in zip(here, fam):
                for b, mask_b in zip(here, fam):
                    if a >= b:
                        continue
                    if mask_a & ~mask_b == 0 and mask_a != mask_b:
                        out[(a, b)] = NESTED
                    elif mask_b & ~mask_a == 0 and mask_a != mask_b:
                        out[(a, b)] = CONTAINS
                    elif mask_b & ~links[mask_a] == 0:
                        out[(a, b)] = ORTHOGONAL
        self._witnessed = out
        return out

    # -- restructuring -------------------------------------------------------

    def heavy_masks(self):
        """Types whose coned factor space is unbounded."""
        return tuple(
            m for m in self.family if factor_space_unbounded(self.graph, m)
        )

    def restructure(self):
        """Classify every domain for the unbounded-products structure.

        kept: the top domain plus every domain whose factor and orthogonal
        complement are both unbounded.  collapse: domains nested in a domain
        V with unbounded factor space admitting an orthogonal partner with
        unbounded factor space (their factor cosets get coned into the new
        top space).  removed: discarded domains whose own factor space is
        unbounded.  Membership of all three sets is type-level because every
        family type passes through every ball element.
        """
        graph = self.graph
        heavy = set(self.heavy_masks())
        partnered = {
            b
            for b in heavy
            if any(c & ~graph.link(b) == 0 for c in heavy if c != b)
        }
        collapse_masks = {
            a
            for a in self.family
            if any(a & ~b == 0 for b in partnered)
        }
        kept_masks = {graph.full_mask} | {
            m
            for m in self.family
            if not self.boundedness[m][0] and not self.boundedness[m][1]
        }
        removed_masks = {
            m
            for m in self.family
            if m not in kept_masks and factor_space_unbounded(graph, m)
        }
        kept, collapse, removed = set(), set(), set()
        for i, dom in enumerate(self.domains):
            if dom.mask in kept_masks:
                kept.add(i)
            if dom.mask in collapse_masks:
                collapse.add(i)
            if dom.mask in removed_masks:
                removed.add(i)
        verification = {
            "collapse_nesting_closed": all(
                a in collapse_masks
                for a in self.family
                for b in collapse_masks
                if a & ~b == 0
            ),
            "clean_containers_checked": 0,
            "clean_containers_failures": 0,
        }
        self._verify_clean_containers(verification)
        self.max_orthogonal = self._max_orthogonal_family()
        self.kept_ids = tuple(sorted(kept))
        self.collapse_ids = tuple(sorted(collapse))
        self.removed_ids = tuple(sorted(removed))
        self.verification = verification
        return self

    def _verify_clean_containers(self, verification):
        """For every witnessed pair U nested in T whose orthogonal family
        inside T is nonempty, the link-based container through the shared
        element must be orthogonal to U and contain every witnessed V."""
        graph = self.graph
        witnessed = self.witnessed_relations()
        fam_set = self._family_set
        for (i, j), code in witnessed.items():
            if code == NESTED:
                u_id, t_id = i, j
            elif code == CONTAINS:
                u_id, t_id = j, i
            else:
                continue
            u, t = self.domains[u_id], self.domains[t_id]
            c_mask = graph.link(u.mask) & t.mask
            if not c_mask or c_mask not in fam_set:
                continue
            shared = set(self.realization_class(u_id)) & set(
                self.realization_class(t_id)
            )
            if not shared:
                continue
            pos = min(shared)
            cont_id = self.domain_of_element[c_mask][pos]
            verification["clean_containers_checked"] += 1
            if self.relation(u_id, cont_id) != ORTHOGONAL:
                verification["clean_containers_failures"] += 1

    def _max_orthogonal_family(self):
        orth = nx.Graph()
        orth.add_nodes_from(range(len(self.domains)))
        for (i, j), code in self.witnessed_relations().items():
            if code == ORTHOGONAL:
                orth.add_edge(i, j)
        return max((len(c) for c in nx.find_cliques(orth)), default=1)

    def collapse_masks(self):
        """Type masks whose coset families get coned to form the top space."""
        assert self.collapse_ids is not None, "run restructure() first"
        return tuple(sorted({self.domains[i].mask for i in self.collapse_ids}))

    def kept_masks(self):
        assert self.kept_ids is not None, "run restructure() first"
        return tuple(sorted({self.domains[i].mask for i in self.kept_ids}))

    def to_json(self, relation_cap=50_000):
        graph = self.graph
        nodes = []
        kept = set(self.kept_ids or ())
        collapsed = set(self.collapse_ids or ())
        removed = set(self.removed_ids or ())
        done = self.kept_ids is not None
        for i, dom in enumerate(self.domains):
            f_b, e_b = self.boundedness[dom.mask]
            nodes.append(
                {
                    "id": i,
                    "type": list(graph.subset_names(dom.mask)),
                    "key": str(dom.key),
                    "level": dom.level,
                    "factor_bounded": f_b,
                    "complement_bounded": e_b,
                    "kept": i in kept if done else None,
                    "collapsed": i in collapsed if done else None,
                    "removed": i in removed if done else None,
                }
            )
        witnessed = self.witnessed_relations()
        edges = [
            {"source": i, "target": j, "relation": code}
            for (i, j), code in sorted(witnessed.items())[:relation_cap]
        ]
        return {
            "domains": nodes,
            "witnessed_relations": edges,
            "relations_truncated": len(witnessed) > relation_cap,
            "max_orthogonal": self.max_orthogonal,
            "verification": self.verification,
        }


def _flip(code):
    if code == NESTED:
        return CONTAINS
    if code == CONTAINS:
        return NESTED
    return code


def enumerate_domains(ball, family=None, budget=200_000):
    family = factor_family(ball.graph) if family is None else family
    return StructureIndex(ball, family, budget=budget)
