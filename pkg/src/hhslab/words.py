"""Normal forms and exact word arithmetic in graph products of cyclic groups.

Elements are kept fully reduced and canonical: among all shuffle-equivalent
reduced syllable sequences we store the lexicographically least under the
declared vertex order (ShortLex).  Reduction is done syllable-by-syllable on
the right, which keeps every intermediate word reduced; canonicalization is a
greedy lex-least topological sort of the syllable dependency order.

All functions here are exact for words of arbitrary length; nothing depends
on a Cayley-ball radius.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .graphs import DefiningGraph


def reduce_append(syllables, v, e, adj, orders):
    """Right-multiply the reduced syllable list by v**e, returning a reduced list.

    Scans backward across syllables commuting with v; merges into the last
    same-vertex syllable if reachable, else appends.
    """
    i = len(syllables) - 1
    while i >= 0:
        u, f = syllables[i]
        if u == v:
            if orders[v] == 2:
                return syllables[:i] + syllables[i + 1 :]
            g = f + e
            if g == 0:
                return syllables[:i] + syllables[i + 1 :]
            return syllables[:i] + [(v, g)] + syllables[i + 1 :]
        if not adj[u] >> v & 1:
            break
        i -= 1
    return syllables + [(v, e)]


def canonical_order(syllables, adj, n):
    """Greedy lex-least linear extension of the syllable dependency order.

    Two syllables commute iff their vertices are adjacent; among the syllables
    with no earlier non-commuting syllable left, the smallest vertex is
    emitted first.  Unique because no two movable syllables share a vertex.
    """
    rest = list(syllables)
    out = []
    while rest:
        blocked = 0
        best = -1
        for idx, (u, _) in enumerate(rest):
            if not blocked >> u & 1 and (best < 0 or u < rest[best][0]):
                best = idx
            blocked |= (1 << u) | (((1 << n) - 1) & ~adj[u])
            if blocked == (1 << n) - 1:
                break
        out.append(rest.pop(best))
    return out


@dataclass(frozen=True)
class NormalWord:
    """A group element in canonical normal form.

    syllables: tuple of (vertex index, exponent); exponent is 1 for order-2
    vertices and any nonzero int for order-0 vertices.
    """

    graph: DefiningGraph = field(compare=False)
    syllables: tuple

    def __post_init__(self):
        pass

    @cached_property
    def length(self):
        """Word length over the standard generators: sum of |exponent|."""
        return sum(abs(e) for _, e in self.syllables)

    @cached_property
    def support(self):
        """Bitmask of vertices occurring in the word."""
        mask = 0
        for v, _ in self.syllables:
            mask |= 1 << v
        return mask

    def is_identity(self):
        return not self.syllables

    def __bool__(self):
        return bool(self.syllables)

    def __mul__(self, other):
        if other.graph is not self.graph and other.graph != self.graph:
            raise ValueError("cannot multiply words over different defining graphs")
        adj, orders = self.graph.adj, self.graph.orders
        acc = list(self.syllables)
        for v, e in other.syllables:
            acc = reduce_append(acc, v, e, adj, orders)
        return NormalWord(self.graph, tuple(canonical_order(acc, adj, self.graph.size)))

    def __invert__(self):
        orders = self.graph.orders
        rev = [(v, e if orders[v] == 2 else -e) for v, e in reversed(self.syllables)]
        return NormalWord(
            self.graph, tuple(canonical_order(rev, self.graph.adj, self.graph.size))
        )

    def __pow__(self, n):
        if n < 0:
            return (~self) ** (-n)
        out = identity(self.graph)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self, by):
        return by * self * ~by

    def letters(self):
        """The word spelled out one generator power at a time."""
        out = []
        for v, e in self.syllables:
            step = 1 if e > 0 else -1
            out.extend([(v, step)] * abs(e))
        return out

    def __str__(self):
        if not self.syllables:
            return "1"
        names = self.graph.names
        toks = []
        for v, e in self.letters():
            toks.append(names[v] if e > 0 else names[v] + "'")
        sep = "" if all(len(n) == 1 for n in names) else "."
        return sep.join(toks)

    def __repr__(self):
        return f"<word {self}>"


def identity(graph):
    return NormalWord(graph, ())


def generator(graph, v, exponent=1):
    if isinstance(v, str):
        v = graph.index(v)
    if exponent == 0:
        return identity(graph)
    if graph.orders[v] == 2:
        exponent = 1
    return NormalWord(graph, ((v, exponent),))


def from_letters(graph, letters):
    """Build a word from (vertex, ±1) steps (or (vertex, exponent) syllables)."""
    acc = []
    for v, e in letters:
        if isinstance(v, str):
            v = graph.index(v)
        if graph.orders[v] == 2:
            e = 1
        if e == 0:
            continue
        acc = reduce_append(acc, v, e, graph.adj, graph.orders)
    return NormalWord(graph, tuple(canonical_order(acc, graph.adj, graph.size)))


def parse_word(graph, text):
    """Parse a word argument: generator tokens back to back when all vertex
    names are single letters, or separated by '.'; a trailing ' marks an
    inverse (e.g. "acac", "x.y'.x").
    """
    text = text.strip()
    if text in ("", "1"):
        return identity(graph)
    if "." in text:
        raw = text.split(".")
    elif all(len(n) == 1 for n in graph.names):
        raw = []
        for ch in text:
            if ch == "'":
                if not raw:
                    raise ValueError(f"dangling inverse mark in {text!r}")
                raw[-1] += "'"
            else:
                raw.append(ch)
    else:
        raw = [text]
    letters = []
    for tok in raw:
        inv = tok.endswith("'")
        name = tok[:-1] if inv else tok
        letters.append((graph.index(name), -1 if inv else 1))
    return from_letters(graph, letters)


def distance(x, y):
    """Exact word-metric distance d(x, y) = length(x^-1 y).

    Works on raw reduced syllable lists, skipping canonicalization: the
    length is shuffle-invariant.
    """
    graph = x.graph
    adj, orders = graph.adj, graph.orders
    acc = [(v, e if orders[v] == 2 else -e) for v, e in reversed(x.syllables)]
    for v, e in y.syllables:
        acc = reduce_append(acc, v, e, adj, orders)
    return sum(abs(e) for _, e in acc)


# ---------------------------------------------------------------------------
# Parabolic decompositions.  For a vertex subset A (bitmask), every word w
# factors uniquely as w = w_A * w' with w_A in W_A maximal (the A-prefix) and
# symmetrically as w = w'' * w_A with w_A maximal (the A-suffix).


def split_prefix(word, mask):
    """Maximal decomposition word = prefix * rest with prefix in W_mask.

    A syllable moves into the prefix iff its vertex lies in the mask and every
    earlier remaining syllable commutes with it; repeats to a fixpoint.
    """
    graph = word.graph
    adj, n = graph.adj, graph.size
    rest = list(word.syllables)
    prefix = []
    changed = True
    while changed:
        changed = False
        blocked = 0
        i = 0
        while i < len(rest):
            u, e = rest[i]
            if mask >> u & 1 and not blocked >> u & 1:
                prefix.append(rest.pop(i))
                changed = True
                continue
            blocked |= (1 << u) | (((1 << n) - 1) & ~adj[u])
            if blocked == (1 << n) - 1:
                break
            i += 1
    wp = NormalWord(graph, tuple(canonical_order(prefix, adj, n)))
    wr = NormalWord(graph, tuple(canonical_order(rest, adj, n)))
    return wp, wr


def split_suffix(word, mask):
    """Maximal decomposition word = rest * suffix with suffix in W_mask."""
    sp, sr = split_prefix(~word, mask)
    return ~sr, ~sp


def coset_minrep(word, mask):
    """Minimal-length representative of the left coset word * W_mask."""
    rest, _ = split_suffix(word, mask)
    return rest


def gate(x, base, mask):
    """The unique nearest point to x in the convex coset base * W_mask.

    Satisfies d(x, q) = d(x, gate) + d(gate, q) for every q in the coset.
    """
    h = (~base) * x
    prefix, _ = split_prefix(h, mask)
    return base * prefix


def in_coset(x, base, mask):
    """Membership test x in base * W_mask."""
    return not (((~base) * x).support & ~mask)
