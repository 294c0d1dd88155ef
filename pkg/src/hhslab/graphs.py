"""Defining graphs of graph products of cyclic groups.

A vertex of order 2 carries an involution (Coxeter generator), a vertex of
order 0 carries an infinite cyclic group (Artin generator); adjacent vertex
groups commute.  Vertices are indexed in declaration order and that order is
what makes normal forms canonical, so it is part of the data.  Vertex subsets
are bitmask ints throughout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

ALLOWED_ORDERS = (2, 0)


class GraphFormatError(ValueError):
    """Malformed .ggp or JSON graph input; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


@dataclass(frozen=True)
class DefiningGraph:
    names: tuple
    orders: tuple  # per vertex: 2 (involution) or 0 (infinite cyclic)
    adj: tuple  # adj[i] = bitmask of neighbours of i; no self-bit

    @property
    def size(self):
        return len(self.names)

    @property
    def full_mask(self):
        return (1 << len(self.names)) - 1

    def index(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown generator {name!r}") from None

    def vertices(self, mask):
        """Sorted vertex indices of a bitmask."""
        return [v for v in range(len(self.names)) if mask >> v & 1]

    def mask_of(self, names):
        mask = 0
        for name in names:
            mask |= 1 << self.index(name)
        return mask

    def subset_names(self, mask):
        return tuple(self.names[v] for v in self.vertices(mask))

    def link(self, mask):
        """Vertices adjacent to every vertex of `mask`, excluding `mask` itself."""
        out = self.full_mask
        for v in self.vertices(mask):
            out &= self.adj[v]
        return out & ~mask

    def star(self, mask):
        return mask | self.link(mask)

    def is_clique(self, mask):
        for v in self.vertices(mask):
            if mask & ~self.adj[v] & ~(1 << v):
                return False
        return True

    def is_finite_parabolic(self, mask):
        """True iff the parabolic subgroup on `mask` is finite."""
        if not self.is_clique(mask):
            return False
        return all(self.orders[v] == 2 for v in self.vertices(mask))

    def is_join(self, mask):
        """True iff the induced subgraph on `mask` splits as a join of two
        nonempty parts, i.e. its complement graph is disconnected."""
        verts = self.vertices(mask)
        if len(verts) < 2:
            return False
        seen = 1 << verts[0]
        frontier = [verts[0]]
        while frontier:
            v = frontier.pop()
            for w in verts:
                bit = 1 << w
                if not seen & bit and not self.adj[v] >> w & 1:
                    seen |= bit
                    frontier.append(w)
        return seen != mask

    def induced(self, mask):
        """The defining graph restricted to `mask`, with vertex order inherited."""
        verts = self.vertices(mask)
        pos = {v: i for i, v in enumerate(verts)}
        adj = []
        for v in verts:
            m = 0
            for w in verts:
                if self.adj[v] >> w & 1:
                    m |= 1 << pos[w]
            adj.append(m)
        return DefiningGraph(
            names=tuple(self.names[v] for v in verts),
            orders=tuple(self.orders[v] for v in verts),
            adj=tuple(adj),
        )

    def to_json(self):
        return {
            "vertices": [{"name": n, "order": o} for n, o in zip(self.names, self.orders)],
            "edges": [
                [self.names[v], self.names[w]]
                for v in range(self.size)
                for w in self.vertices(self.adj[v])
                if w > v
            ],
        }


def build_graph(vertices, edges):
    """Validate and assemble a DefiningGraph from (name, order) pairs and name pairs."""
    names = []
    orders = []
    for name, order in vertices:
        if name in names:
            raise GraphFormatError(f"duplicate vertex {name!r}")
        if order not in ALLOWED_ORDERS:
            raise GraphFormatError(
                f"vertex {name!r} has unsupported order {order!r} (only 2 and inf)"
            )
        names.append(name)
        orders.append(order)
    if not names:
        raise GraphFormatError("no generators")
    index = {n: i for i, n in enumerate(names)}
    adj = [0] * len(names)
    for u, w in edges:
        if u not in index:
            raise GraphFormatError(f"edge endpoint {u!r} is not a vertex")
        if w not in index:
            raise GraphFormatError(f"edge endpoint {w!r} is not a vertex")
        if u == w:
            raise GraphFormatError(f"loop edge at {u!r}")
        adj[index[u]] |= 1 << index[w]
        adj[index[w]] |= 1 << index[u]
    return DefiningGraph(names=tuple(names), orders=tuple(orders), adj=tuple(adj))


def _parse_order(token, line):
    if token == "inf":
        return 0
    if token == "2":
        return 2
    raise GraphFormatError(f"bad order token {token!r} (expected 2 or inf)", line)


def parse_graph(text):
    """Parse the .ggp format:

        # pentagon
        vertices: a:2 b:2 c:2 d:2 e:2
        edges: a-b b-c c-d d-e e-a

    Raises GraphFormatError with a line number on malformed input.
    """
    vertices = []
    edges = []
    saw_vertices = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("vertices:"):
            saw_vertices = True
            for tok in line[len("vertices:") :].split():
                if ":" not in tok:
                    raise GraphFormatError(f"vertex token {tok!r} lacks ':order'", lineno)
                name, _, order = tok.partition(":")
                if not name:
                    raise GraphFormatError(f"empty vertex name in {tok!r}", lineno)
                vertices.append((name, _parse_order(order, lineno)))
        elif line.startswith("edges:"):
            for tok in line[len("edges:") :].split():
                if "-" not in tok:
                    raise GraphFormatError(f"edge token {tok!r} lacks '-'", lineno)
                u, _, w = tok.partition("-")
                edges.append((u, w))
        else:
            raise GraphFormatError(f"unrecognized line {line!r}", lineno)
    if not saw_vertices:
        raise GraphFormatError("no generators")
    try:
        return build_graph(vertices, edges)
    except GraphFormatError:
        raise
    except ValueError as exc:  # pragma: no cover - defensive
        raise GraphFormatError(str(exc)) from exc


def parse_graph_json(payload):
    """JSON mirror: {"vertices": [{"name": "a", "order": 2}], "edges": [["a","b"]]}."""
    if isinstance(payload, str):
        payload = json.loads(payload)
    vertices = []
    for entry in payload.get("vertices", []):
        order = entry.get("order")
        if order == "inf" or order == 0:
            order = 0
        elif order != 2:
            raise GraphFormatError(f"bad order token {order!r} (expected 2 or inf)")
        vertices.append((entry["name"], order))
    edges = [tuple(e) for e in payload.get("edges", [])]
    return build_graph(vertices, edges)


def load_graph(path):
    """Load a graph from a .ggp file or its JSON mirror, by extension."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if str(path).endswith(".json"):
        return parse_graph_json(text)
    return parse_graph(text)
