"""Hyperplanes (walls) of the cube complex dual to a Cayley ball, their
carriers and stabilizers, and the contact graph.

A wall is identified by its label v together with the closed-form carrier
coset: g*W_st(v) for an involution, g*W_lk(v) (times {1, v}) for an
infinite-order vertex.  The square-parallelism relation is also computed by
union-find inside the ball and certified against the closed form: truncation
at the boundary may break a wall into several parallelism pieces, but never
merges two distinct walls.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import words as W
from .balls import CayleyBall, ParabolicCoset, word_sort_key


def wall_mask(graph, v):
    """Vertex set of the carrier coset: st(v) for order 2, lk(v) for order 0."""
    if graph.orders[v] == 2:
        return graph.star(1 << v)
    return graph.link(1 << v)


def edge_wall_key(graph, g, v):
    """Closed-form wall key of the edge (g, g*v)."""
    return (v, W.coset_minrep(g, wall_mask(graph, v)))


@dataclass(frozen=True)
class Wall:
    label: int  # vertex index
    key: ParabolicCoset  # carrier coset, minimal representative
    dual_edges: tuple  # indices into ball.edges

    def stabilizer_mask(self, graph):
        return wall_mask(graph, self.label)

    def translated_key(self, g):
        """Key of the image wall under left multiplication by g."""
        return W.coset_minrep(g * self.key.base, self.key.mask)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def walls(ball: CayleyBall, certify=True):
    """All walls meeting the ball, one per closed-form key, ShortLex-sorted.

    With certify=True the square-parallelism closure is recomputed inside the
    ball by union-find and checked to refine the closed-form classes.
    """
    graph = ball.graph
    by_key = {}
    edge_keys = []
    for eidx, (i, j, v) in enumerate(ball.edges):
        key = edge_wall_key(graph, ball.elements[i], v)
        edge_keys.append(key)
        by_key.setdefault(key, []).append(eidx)
    if certify:
        _certify_parallelism(ball, edge_keys)
    out = []
    for (v, base), dual in sorted(
        by_key.items(), key=lambda kv: (kv[0][0], word_sort_key(kv[0][1]))
    ):
        coset = ParabolicCoset(base=base, mask=wall_mask(graph, v))
        out.append(Wall(label=v, key=coset, dual_edges=tuple(sorted(dual))))
    return out


def _certify_parallelism(ball, edge_keys):
    """Union-find closure of (g,gv) ~ (gt,gtv), t in lk(v), within the ball;
    every resulting class must sit inside one closed-form wall."""
    graph = ball.graph
    edge_index = {}
    for eidx, (i, j, v) in enumerate(ball.edges):
        edge_index[(i, v)] = eidx
    uf = _UnionFind(len(ball.edges))
    for eidx, (i, j, v) in enumerate(ball.edges):
        g = ball.elements[i]
        for t in graph.vertices(graph.link(1 << v)):
            for exp in ((1,) if graph.orders[t] == 2 else (1, -1)):
                gt = g * W.generator(graph, t, exp)
                it = ball.index.get(gt)
                if it is None:
                    continue
                if graph.orders[v] == 2:
                    other = edge_index.get((it, v))
                    if other is None:
                        jt = ball.index.get(gt * W.generator(graph, v))
                        other = edge_index.get((jt, v)) if jt is not None else None
                else:
                    other = edge_index.get((it, v))
                if other is not None:
                    uf.union(eidx, other)
    rep_key = {}
    for eidx, key in enumerate(edge_keys):
        root = uf.find(eidx)
        if root in rep_key:
            assert rep_key[root] == key, "parallelism class crosses two wall keys"
        else:
            rep_key[root] = key


def wall_carrier(wall: Wall, ball: CayleyBall):
    """Ball vertices on the wall's dual edges (subset of the key coset)."""
    verts = set()
    for eidx in wall.dual_edges:
        i, j, _ = ball.edges[eidx]
        verts.add(i)
        verts.add(j)
    return sorted(verts)


def wall_stabilizer(wall: Wall, ball: CayleyBall):
    """Ball elements stabilizing the wall, by the algebraic carrier test:
    k fixes the wall iff key^-1 k key lies in the carrier parabolic."""
    graph = ball.graph
    base = wall.key.base
    mask = wall.key.mask
    out = []
    for g in ball.elements:
        if not (((~base) * g * base).support & ~mask):
            out.append(g)
    return out


def wall_orbit_check(wall: Wall, ball: CayleyBall, g):
    """Setwise action check on dual edges, restricted to images inside the ball:
    returns (moved_inside, total_inside)."""
    inside = 0
    moved = 0
    dual = set(wall.dual_edges)
    edge_index = {(i, v): e for e, (i, j, v) in enumerate(ball.edges)}
    for eidx in wall.dual_edges:
        i, j, v = ball.edges[eidx]
        gi = ball.index.get(g * ball.elements[i])
        gj = ball.index.get(g * ball.elements[j])
        if gi is None or gj is None:
            continue
        inside += 1
        image = edge_index.get((gi, v))
        if image is None:
            image = edge_index.get((gj, v))
        if image is None or image not in dual:
            moved += 1
    return moved, inside


def walls_separating(x, y, graph):
    """Distinct wall keys crossed by a normal-form geodesic from x to y."""
    keys = set()
    p = x
    for v, e in ((~x) * y).letters():
        if graph.orders[v] == 0 and e < 0:
            base = p * W.generator(graph, v, -1)
        else:
            base = p
        keys.add(edge_wall_key(graph, base, v))
        p = p * W.generator(graph, v, e)
    assert p == y
    return keys


@dataclass(frozen=True)
class ContactGraph:
    ball: CayleyBall
    walls: tuple
    indptr: np.ndarray
    indices: np.ndarray
    crossing: frozenset  # pairs (i, j), i < j, of walls sharing a square

    @property
    def n(self):
        return len(self.walls)

    def wall_id(self, v, base):
        return self._key_index().get((v, base))

    def _key_index(self):
        if not hasattr(self, "_keys"):
            object.__setattr__(
                self, "_keys", {(w.label, w.key.base): i for i, w in enumerate(self.walls)}
            )
        return self._keys

    def translate_node(self, node, g):
        """Wall id of g * wall, or None if that wall does not meet the ball."""
        w = self.walls[node]
        return self.wall_id(w.label, w.translated_key(g))


def contact_graph(wall_list, ball: CayleyBall):
    """Adjacency = carriers share a ball vertex; crossing flagged separately."""
    touching = {}
    for widx, wall in enumerate(wall_list):
        for vtx in wall_carrier(wall, ball):
            touching.setdefault(vtx, []).append(widx)
    adj = [set() for _ in wall_list]
    for vtx, ws in touching.items():
        for a in ws:
            for b in ws:
                if a != b:
                    adj[a].add(b)
    # crossing: two walls dual to the two directions of a common square corner
    crossing = set()
    graph = ball.graph
    edge_at = {}
    for eidx, (i, j, v) in enumerate(ball.edges):
        edge_at.setdefault(i, []).append((v, eidx))
        if graph.orders[v] == 2:
            edge_at.setdefault(j, []).append((v, eidx))
    wall_of_edge = {}
    for widx, wall in enumerate(wall_list):
        for eidx in wall.dual_edges:
            wall_of_edge[eidx] = widx
    for vtx, incident in edge_at.items():
        g = ball.elements[vtx]
        for (u, e1) in incident:
            for (v, e2) in incident:
                if u >= v or not graph.adj[u] >> v & 1:
                    continue
                corner = g * W.generator(graph, u) * W.generator(graph, v)
                if corner in ball.index:
                    a, b = wall_of_edge[e1], wall_of_edge[e2]
                    if a != b:
                        crossing.add((min(a, b), max(a, b)))
    indptr = np.zeros(len(wall_list) + 1, dtype=np.int64)
    flat = []
    for i, nbrs in enumerate(adj):
        flat.extend(sorted(nbrs))
        indptr[i + 1] = len(flat)
    return ContactGraph(
        ball=ball,
        walls=tuple(wall_list),
        indptr=indptr,
        indices=np.asarray(flat, dtype=np.int64),
        crossing=frozenset(crossing),
    )
