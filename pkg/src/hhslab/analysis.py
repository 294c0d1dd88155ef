"""Coarse-geometric checkers: bounded projections, the contracting property,
Morse gauges, the distance formula, the three-way stability test, random
subgroups, hierarchy-path diagnostics, and the axiom estimator.

All distances between group elements are exact (normal-form lengths), so
paths and orbits may leave the ball; the ball serves as a deterministic pool
of offsets for ambient sampling and as the vertex set of coned spaces.
Verdicts about boundedness are scale-stability statements: a quantity is
"bounded" when its maximum over the far half of the observed scale does not
exceed its maximum over the near half by more than an additive slack.  Every
report echoes the thresholds it used.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import words as W
from .balls import random_word
from .coned import ConedGraph, estimate_delta
from .graphs import DefiningGraph
from .structure import NESTED, ORTHOGONAL, TRANSVERSE, UndecidableWithinBall

GROWTH_SLACK = 2  # additive slack for the scale-stability rule


def stable_at_scale(near, far, slack=GROWTH_SLACK):
    """The shared boundedness rule: far-scale maximum must not exceed the
    near-scale maximum by more than the slack."""
    return far <= near + slack


# ---------------------------------------------------------------------------
# Path samples


@dataclass(frozen=True)
class PathSample:
    points: tuple  # NormalWords, in order
    kind: str  # "geodesic" | "quasigeodesic" | "axis" | "orbit"
    label: str
    certified: bool = True
    boundary: tuple = ()  # indices whose neighbourhoods leave the sampled window

    def __len__(self):
        return len(self.points)


def geodesic_path(x, y):
    """The normal-form geodesic from x to y, one vertex per letter."""
    graph = x.graph
    points = [x]
    p = x
    for v, e in ((~x) * y).letters():
        p = p * W.generator(graph, v, e)
        points.append(p)
    return PathSample(tuple(points), "geodesic", f"[{x}..{y}]",
                      boundary=(0, len(points) - 1))


def axis_path(g, half_steps):
    """Points g^k for k in [-half_steps, half_steps]."""
    graph = g.graph
    points = [g**k for k in range(-half_steps, half_steps + 1)]
    return PathSample(tuple(points), "axis", f"axis({g})",
                      boundary=(0, len(points) - 1))


def orbit_sample(gens, h_radius, point_budget=80):
    """Orbit of the identity under <gens> out to h_radius in the subgroup
    word metric; returns (PathSample, {element: subgroup distance})."""
    graph = gens[0].graph if gens else None
    ident = W.identity(graph) if graph else None
    if not gens or all(g.is_identity() for g in gens):
        return PathSample((ident,), "orbit", "orbit(<1>)"), {ident: 0}
    sym = []
    for g in gens:
        sym.append(g)
        sym.append(~g)
    dist = {ident: 0}
    frontier = [ident]
    for level in range(1, h_radius + 1):
        nxt = []
        for p in frontier:
            for s in sym:
                q = p * s
                if q not in dist:
                    dist[q] = level
                    nxt.append(q)
        frontier = nxt
        if len(dist) > point_budget:
            break
    points = tuple(sorted(dist, key=lambda w: (dist[w], w.length, str(w))))
    top_level = max(dist.values())
    boundary = tuple(i for i, p in enumerate(points) if dist[p] == top_level)
    label = "orbit(<" + ",".join(str(g) for g in gens) + ">)"
    return PathSample(points, "orbit", label, boundary=boundary), dist


def densify_orbit(orbit, h_dist, gens, cap=160):
    """Unit-step refinement of an orbit: the union of normal-form geodesics
    along the orbit-graph edges (p, p*s).  Detour excursions are measured
    against this set so that the gaps between sparse orbit points do not
    register as instability."""
    if len(orbit.points) == 1:
        return orbit
    sym = []
    for g in gens:
        if not g.is_identity():
            sym.append(g)
            sym.append(~g)
    top_level = max(h_dist.values())
    seen = set(orbit.points)
    dense = list(orbit.points)
    edge_of = {p: h_dist[p] == top_level for p in orbit.points}
    for p in orbit.points:
        for s in sym:
            q = p * s
            if q not in h_dist:
                continue
            marginal = edge_of[p] or edge_of[q]
            for z in geodesic_path(p, q).points[1:-1]:
                if z not in seen:
                    seen.add(z)
                    dense.append(z)
                    edge_of[z] = marginal
    if len(dense) > cap:
        stride = len(dense) / cap
        dense = [dense[int(i * stride)] for i in range(cap)]
    boundary = tuple(i for i, p in enumerate(dense) if edge_of.get(p, False))
    return PathSample(tuple(dense), "orbit-dense", orbit.label, boundary=boundary)


def densify_axis(axis, cap=160):
    """Unit-step refinement of a power path (geodesics between consecutive
    powers)."""
    pts = []
    for a, b in zip(axis.points, axis.points[1:]):
        pts.extend(geodesic_path(a, b).points[:-1])
    pts.append(axis.points[-1])
    if len(pts) > cap:
        stride = len(pts) / cap
        pts = [pts[int(i * stride)] for i in range(cap)]
    return PathSample(tuple(pts), "axis-dense", axis.label,
                      boundary=(0, len(pts) - 1))


# ---------------------------------------------------------------------------
# Bounded projections


@dataclass(frozen=True)
class BoundedProjectionsReport:
    bounded: bool
    diameter: int
    near_diameter: int
    which: str
    domains_scanned: int
    worst_domain: str | None

    def to_json(self):
        return {
            "bounded": self.bounded,
            "diameter": self.diameter,
            "near_diameter": self.near_diameter,
            "which": self.which,
            "domains_scanned": self.domains_scanned,
            "worst_domain": self.worst_domain,
        }


def domains_through_points(points, idx, dense=True):
    """Candidate relevant domains: every family type through every sample
    point (and through the letters of consecutive geodesics when dense).
    Distant parallel classes contribute uniformly small projection noise;
    the exhaustive scan is kept for cross-checks."""
    seen = []
    at = set()
    full = idx.graph.full_mask
    stops = list(points)
    if dense:
        for a, b in zip(points, points[1:]):
            p = a
            for v, e in ((~a) * b).letters():
                p = p * W.generator(idx.graph, v, e)
                stops.append(p)
    for p in stops:
        for mask in idx.family:
            if mask == full:
                continue
            dom = idx.domain_at(mask, p)
            if dom is not None and dom not in at:
                at.add(dom)
                seen.append(dom)
    return sorted(at)


def bounded_projections(path, idx, table, which="full", exhaustive=False, cutoff=None):
    """Max projection diameter of the sample over non-maximal domains.

    which="full" scans the whole index, which="kept" only the restructured
    domain set.  The verdict combines the cutoff with scale stability: the
    diameter over the first half of the sample must already realize the
    diameter up to the slack.
    """
    points = list(path.points)
    if exhaustive:
        candidate_ids = [i for i in range(len(idx.domains)) if i != idx.top_id]
    else:
        candidate_ids = [
            i for i in domains_through_points(points, idx) if i != idx.top_id
        ]
    if which == "kept":
        assert idx.kept_ids is not None, "restructure() the index first"
        kept = set(idx.kept_ids)
        candidate_ids = [i for i in candidate_ids if i in kept]
    half = points[: max(2, (len(points) + 1) // 2)]
    diameter = 0
    near = 0
    worst = None
    for dom_id in candidate_ids:
        nodes = [table.project(dom_id, p) for p in points]
        if len(set(nodes)) == 1:
            continue
        fs = table.factor_space(idx.domains[dom_id].mask)
        d = fs.set_diameter(nodes)
        if d > diameter:
            diameter = d
            worst = idx.domains[dom_id].label(idx.graph)
        d_half = fs.set_diameter(nodes[: len(half)])
        near = max(near, d_half)
    if cutoff is None:
        cutoff = 4 * max(table.xi_prime, 1) + 2 * GROWTH_SLACK
    bounded = diameter <= cutoff and stable_at_scale(near, diameter)
    return BoundedProjectionsReport(
        bounded=bounded,
        diameter=diameter,
        near_diameter=near,
        which=which,
        domains_scanned=len(candidate_ids),
        worst_domain=worst,
    )


# ---------------------------------------------------------------------------
# Contracting


@dataclass(frozen=True)
class ContractionReport:
    verdict: str  # "contracting" | "not-contracting" | "inconclusive"
    d_prime: int
    contraction: Fraction
    near_defect: int
    max_offset: int
    witness: str | None
    samples: int

    @property
    def is_contracting(self):
        return self.verdict == "contracting"

    def to_json(self):
        return {
            "verdict": self.verdict,
            "d_prime": self.d_prime,
            "contraction": str(self.contraction),
            "near_defect": self.near_defect,
            "max_offset": self.max_offset,
            "witness": self.witness,
            "samples": self.samples,
        }


def _closest_points(x, points):
    best = None
    arg = []
    for j, p in enumerate(points):
        d = W.distance(x, p)
        if best is None or d < best:
            best = d
            arg = [j]
        elif d == best:
            arg.append(j)
    return best, arg


def is_contracting(path, ball, contraction=Fraction(1, 2), seed=0, budget=150):
    """Empirical contraction test for the closest-point projection onto the
    sample: balls around far points must project to sets whose diameter does
    not grow with the distance (scale-stability rule)."""
    points = list(path.points)
    if len(points) < 6:
        return ContractionReport(
            "inconclusive", 0, contraction, 0, 0, "path too short (<6 points)", 0
        )
    span = max(W.distance(points[0], p) for p in points)
    if span == 0:
        return ContractionReport("contracting", 0, contraction, 0, 0, None, 0)
    boundary = set(path.boundary)
    rng = np.random.default_rng(seed)
    pool = ball.elements
    anchors = [i for i in range(len(points)) if i not in boundary] or [0]
    offs = rng.integers(0, len(pool), size=budget)
    anchor_pick = rng.integers(0, len(anchors), size=budget)
    defects = []  # (distance to path, projection diameter, witness)
    used = 0
    for t in range(budget):
        x = points[anchors[int(anchor_pick[t])]] * pool[int(offs[t])]
        dist, arg = _closest_points(x, points)
        if dist < 2 or boundary.intersection(arg):
            continue
        radius = int(contraction * dist)
        if radius < 1:
            continue
        shadow = set(arg)
        complete = True
        for q in ball.elements:
            if q.length > radius:
                continue
            dy, ay = _closest_points(x * q, points)
            if boundary.intersection(ay):
                complete = False
                break
            shadow.update(ay)
        if not complete:
            continue
        used += 1
        diam = max(
            W.distance(points[a], points[b]) for a in shadow for b in shadow
        )
        defects.append((dist, diam, str(x)))
    if not defects:
        return ContractionReport(
            "inconclusive", 0, contraction, 0, 0, "no usable sample points", 0
        )
    far = max(d for d, _, _ in defects)
    near_defect = max((dm for d, dm, _ in defects if 2 * d <= far), default=0)
    d_prime = max(dm for _, dm, _ in defects)
    witness = max(defects, key=lambda t: t[1])[2]
    if far < 4:
        verdict = "inconclusive"
    elif stable_at_scale(near_defect, d_prime):
        verdict = "contracting"
    else:
        verdict = "not-contracting"
    return ContractionReport(
        verdict=verdict,
        d_prime=d_prime,
        contraction=contraction,
        near_defect=near_defect,
        max_offset=far,
        witness=witness if verdict == "not-contracting" else None,
        samples=used,
    )


# ---------------------------------------------------------------------------
# Morse gauge


def _template_points(a, mid, b, second=None):
    """Point list of a two- or three-leg geodesic concatenation, plus the
    indices of the leg corners."""
    pts = list(geodesic_path(a, mid).points)
    corners = [len(pts) - 1]
    if second is not None:
        pts += list(geodesic_path(mid, second).points)[1:]
        corners.append(len(pts) - 1)
        mid = second
    pts += list(geodesic_path(mid, b).points)[1:]
    return pts, corners


def _is_quasigeodesic(pts, K, C, corners=(), grid_cap=14):
    """Parametrized (K, C)-quasigeodesic test on a unit-speed path: the lower
    bound |s-t|/K - C <= d(q(s), q(t)) is checked on a parameter grid that
    always includes the corner neighbourhoods, where concatenated legs
    actually fail (an out-and-back corner violates the bound within a few
    steps, which a coarse grid would miss)."""
    n = len(pts)
    if n <= 2:
        return True
    if n <= grid_cap:
        grid = set(range(n))
    else:
        stride = (n - 1) / (grid_cap - 1)
        grid = {int(round(t * stride)) for t in range(grid_cap)}
    for c in corners:
        for u in range(0, 7):
            for s in (c - u, c + u):
                if 0 <= s < n:
                    grid.add(s)
    grid = sorted(grid)
    for ai in range(len(grid)):
        for bi in range(ai + 1, len(grid)):
            s, t = grid[ai], grid[bi]
            if Fraction(t - s, K) - C > W.distance(pts[s], pts[t]):
                return False
    return True


def morse_gauge(path, ball, k_list=((1, 0), (2, 2)), seed=0, budget=200):
    """Sampled stability gauge: max excursion over the path of two- and
    three-leg geodesic detours with endpoints on the path that pass the
    parametrized (K, C)-quasigeodesic test.

    Returns {(K, C): {"gauge": N, "near": N_half, "bounded": verdict}}.  The
    template family is the documented restriction (concatenations of at most
    three geodesic legs anchored near the path); excursions are capped by
    the offset pool radius, so a gauge at the cap counts as unbounded."""
    points = list(path.points)
    if len(points) < 2:
        raise ValueError("path too short for detour templates")
    rng = np.random.default_rng(seed)
    pool = ball.elements
    pairs = []
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            d = W.distance(points[i], points[j])
            if d >= 2:
                pairs.append((i, j, d))
    if not pairs:
        # a single edge admits only trivial detours: the gauge is exactly 0
        return {
            (K, C): {"gauge": 0, "near": 0, "bounded": True} for K, C in k_list
        }
    if len(pairs) > 10:
        # deterministic spread across scales: quantiles of the distance range
        pairs.sort(key=lambda t: (t[2], t[0], t[1]))
        stride = (len(pairs) - 1) / 9
        pairs = [pairs[int(round(t * stride))] for t in range(10)]
    span = max(d for _, _, d in pairs)
    templates = []  # (endpoint distance, corner points)
    per_pair = max(2, budget // (2 * len(pairs)))
    for i, j, d in pairs:
        anchors = sorted({i, (i + j) // 2, j})
        for _ in range(per_pair):
            a = anchors[int(rng.integers(0, len(anchors)))]
            q = pool[int(rng.integers(0, len(pool)))]
            templates.append((i, j, d, (points[a] * q,)))
        for _ in range(per_pair):
            a, b = sorted(
                (anchors[int(rng.integers(0, len(anchors)))],
                 anchors[int(rng.integers(0, len(anchors)))])
            )
            q1 = pool[int(rng.integers(0, len(pool)))]
            q2 = pool[int(rng.integers(0, len(pool)))]
            templates.append((i, j, d, (points[a] * q1, points[b] * q2)))
    out = {}
    for K, C in k_list:
        gauge = 0
        near = 0
        for i, j, d, corners in templates:
            pts, corner_idx = _template_points(
                points[i], corners[0], points[j],
                corners[1] if len(corners) > 1 else None,
            )
            if len(pts) - 1 > K * d + C:
                continue
            if not _is_quasigeodesic(pts, K, C, corners=corner_idx):
                continue
            if len(pts) > 16:
                stride = (len(pts) - 1) / 15
                probe = [pts[int(round(t * stride))] for t in range(16)]
            else:
                probe = pts
            exc = max(
                min(W.distance(p, z) for z in points) for p in probe
            )
            gauge = max(gauge, exc)
            if 2 * d <= span:
                near = max(near, exc)
        # a (K, C)-quasigeodesic may wander K*(K+C) deep in any space (the
        # out-and-back allowance), so gauges under that floor are never
        # growth evidence; flats blow far past it at this radius
        floor = K * (K + C)
        out[(K, C)] = {
            "gauge": gauge,
            "near": near,
            "bounded": gauge <= max(near + GROWTH_SLACK, floor)
            and gauge <= 2 * ball.radius,
        }
    return out


# ---------------------------------------------------------------------------
# Distance formula


@dataclass(frozen=True)
class DistanceFormulaFit:
    threshold: int
    K: Fraction
    C: Fraction
    pairs: int
    degenerate: bool
    max_lower_residual: int  # worst slack in d <= K*sum + C
    max_upper_residual: int  # worst slack in sum <= K*d + C
    coverage: Fraction

    def to_json(self):
        return {
            "threshold": self.threshold,
            "K": str(self.K),
            "C": str(self.C),
            "pairs": self.pairs,
            "degenerate": self.degenerate,
            "max_lower_residual": self.max_lower_residual,
            "max_upper_residual": self.max_upper_residual,
            "coverage": str(self.coverage),
        }


def projection_sum(x, y, idx, table, threshold, domain_ids=None):
    """Sum of factor distances over the threshold, over candidate relevant
    domains plus the top domain."""
    if domain_ids is None:
        candidates = domains_through_points([x, y], idx)
        if table.structure == "unbounded_products":
            kept = set(table.domain_ids)
            candidates = [i for i in candidates if i in kept]
        domain_ids = list(candidates) + [idx.top_id]
    total = 0
    terms = {}
    for dom_id in domain_ids:
        d = table.dist(dom_id, x, y)
        if d is not None and d > threshold:
            total += d
            terms[dom_id] = d
    return total, terms


def distance_formula_fit(idx, table, ball, threshold, n_pairs=200, seed=0, alpha=1):
    """Two-sided Chebyshev fit d =~_{K,C} sum of thresholded projection
    distances over sampled pairs: C is the smallest additive constant at
    least alpha*threshold covering the zero-sum pairs, K the smallest slope
    covering everything else.  Both inequalities hold for 100% of the sample
    by construction; degenerate (all-zero-sum) fits are flagged."""
    rng = np.random.default_rng(seed)
    n = len(ball.elements)
    samples = []
    for _ in range(n_pairs):
        i, j = int(rng.integers(0, n)), int(rng.integers(0, n))
        x, y = ball.elements[i], ball.elements[j]
        total, _ = projection_sum(x, y, idx, table, threshold)
        samples.append((W.distance(x, y), total))
    degenerate = all(s == 0 for _, s in samples)
    c_floor = Fraction(alpha * threshold)
    c_val = max(
        [c_floor]
        + [Fraction(d) for d, s in samples if s == 0]
        + [Fraction(s) for d, s in samples if d == 0]
    )
    k_val = Fraction(1)
    for d, s in samples:
        if s > 0 and Fraction(d - c_val, s) > k_val:
            k_val = Fraction(d - c_val, s)
        if d > 0 and Fraction(s - c_val, d) > k_val:
            k_val = Fraction(s - c_val, d)
    lower = max((d - (k_val * s + c_val) for d, s in samples), default=0)
    upper = max((s - (k_val * d + c_val) for d, s in samples), default=0)
    covered = sum(
        1
        for d, s in samples
        if d <= k_val * s + c_val and s <= k_val * d + c_val
    )
    return DistanceFormulaFit(
        threshold=threshold,
        K=k_val,
        C=c_val,
        pairs=len(samples),
        degenerate=degenerate,
        max_lower_residual=int(lower) if lower > 0 else 0,
        max_upper_residual=int(upper) if upper > 0 else 0,
        coverage=Fraction(covered, len(samples)),
    )


# ---------------------------------------------------------------------------
# Quasi-isometry fits and the stability tri-test


@dataclass(frozen=True)
class QiFit:
    K: Fraction | None
    C: Fraction
    near_K: Fraction | None
    pairs: int
    embedding: bool

    def to_json(self):
        return {
            "K": None if self.K is None else str(self.K),
            "C": str(self.C),
            "near_K": None if self.near_K is None else str(self.near_K),
            "pairs": self.pairs,
            "embedding": self.embedding,
        }


def qi_fit(pairs, c_floor=2, slack=Fraction(1, 2)):
    """Chebyshev quasi-isometry fit for (d_source, d_target) samples: the
    smallest K with d_t <= K d_s + C and d_s <= K d_t + C.

    The embedding verdict compares near-half and full-scale slopes in each
    direction separately: a genuine embedding has both stable, a collapsing
    map (bounded target, growing source) has the lower-bound slope growing."""
    pairs = [(a, b) for a, b in pairs if a > 0]
    if not pairs:
        return QiFit(None, Fraction(c_floor), None, 0, True)
    c_val = Fraction(c_floor)

    def lower_slope(subset):
        # d_source <= K * d_target + C: grows when the target collapses
        k = Fraction(1)
        for a, b in subset:
            if b > 0:
                k = max(k, Fraction(a - c_val, b))
            elif a > c_val:
                k = max(k, Fraction(a))
        return k

    def upper_slope(subset):
        # d_target <= K * d_source: the ratio is subadditive in the source
        # scale, so no additive constant is needed (and one would make the
        # slope creep at small scales)
        k = Fraction(1)
        for a, b in subset:
            k = max(k, Fraction(b, a))
        return k

    span = max(a for a, _ in pairs)
    near = [(a, b) for a, b in pairs if 2 * a <= span] or pairs
    k_low, k_low_near = lower_slope(pairs), lower_slope(near)
    k_up, k_up_near = upper_slope(pairs), upper_slope(near)
    embedding = k_low <= k_low_near + slack and k_up <= k_up_near + slack
    return QiFit(
        max(k_low, k_up), c_val, max(k_low_near, k_up_near), len(pairs), embedding
    )


@dataclass(frozen=True)
class StabilityReport:
    label: str
    morse_stable: bool
    gauge: dict
    contracting: ContractionReport
    distortion: QiFit
    projections: BoundedProjectionsReport
    qi_into_top: QiFit
    partial: bool
    tri_verdict: str  # "agree" | "disagree"

    @property
    def verdicts(self):
        return (
            self.morse_stable,
            self.distortion.embedding and self.projections.bounded,
            self.qi_into_top.embedding,
        )

    @property
    def stable(self):
        return all(self.verdicts)

    def to_json(self):
        v1, v2, v3 = self.verdicts
        return {
            "subgroup": self.label,
            "morse_stable": v1,
            "undistorted_with_bounded_projections": v2,
            "qi_embeds_in_top_space": v3,
            "tri_verdict": self.tri_verdict,
            "gauge": {f"{k}": val for k, val in sorted(self.gauge.items())},
            "contracting": self.contracting.to_json(),
            "distortion": self.distortion.to_json(),
            "projections": self.projections.to_json(),
            "qi_into_top": self.qi_into_top.to_json(),
            "partial": self.partial,
        }


def top_distance(ts: ConedGraph, x, y):
    """Distance in the top space between arbitrary elements, by translating
    the pair into the ball (both halves of x^-1 y must fit); None if out of
    reach at this radius.  Exact at any length when nothing was collapsed
    (the top space is the Cayley graph itself)."""
    w = (~x) * y
    if ts.mode == "none":
        return w.length
    node = ts.node_of(w)
    ball = ts.ball
    if node is not None:
        return ts.distance(ts.node_of(ball.identity), node)
    letters = w.letters()
    if len(letters) > 2 * ball.radius:
        return None
    u = W.from_letters(w.graph, letters[: len(letters) // 2])
    a = ts.node_of(~u)
    b = ts.node_of(W.from_letters(w.graph, letters[len(letters) // 2 :]))
    if a is None or b is None:
        return None
    return ts.distance(a, b)


def stability_tritest(h_gens, idx, table, ball, ts, h_radius=3, seed=0, budget=400):
    """The three equivalent stability conditions, each tested independently:
    (1) the orbit is Morse (sampled gauge bounded), (2) the subgroup is
    undistorted and has bounded projections over the restructured proper
    domains, (3) the orbit map into the top space is a quasi-isometric
    embedding.  tri_verdict records whether the three verdicts agree."""
    orbit, h_dist = orbit_sample(h_gens, h_radius)
    label = orbit.label
    partial = False
    if len(orbit.points) == 1:
        gauge = {}
        contraction = ContractionReport("contracting", 0, Fraction(1, 2), 0, 0, None, 0)
        fit = QiFit(Fraction(1), Fraction(2), Fraction(1), 0, True)
        proj = BoundedProjectionsReport(True, 0, 0, "kept", 0, None)
        return StabilityReport(
            label, True, gauge, contraction, fit, proj, fit, False, "agree"
        )
    dense = densify_orbit(orbit, h_dist, h_gens)
    gauge = morse_gauge(dense, ball, seed=seed, budget=budget)
    morse_stable = all(row["bounded"] for row in gauge.values())
    contraction = is_contracting(dense, ball, seed=seed + 1, budget=budget)
    dist_pairs = []
    top_pairs = []
    for i, p in enumerate(orbit.points):
        for q in orbit.points[i + 1 :]:
            dh = _orbit_metric(h_dist, p, q)
            if dh is None:
                continue
            dist_pairs.append((dh, W.distance(p, q)))
            dt = top_distance(ts, p, q)
            if dt is None:
                partial = True
            else:
                top_pairs.append((dh, dt))
    distortion = qi_fit(dist_pairs)
    projections = bounded_projections(orbit, idx, table, which="kept")
    qi_top = qi_fit(top_pairs)
    v1 = morse_stable
    v2 = distortion.embedding and projections.bounded
    v3 = qi_top.embedding
    tri = "agree" if v1 == v2 == v3 else "disagree"
    return StabilityReport(
        label=label,
        morse_stable=v1,
        gauge=gauge,
        contracting=contraction,
        distortion=distortion,
        projections=projections,
        qi_into_top=qi_top,
        partial=partial,
        tri_verdict=tri,
    )


def _orbit_metric(h_dist, p, q):
    """Subgroup distance between two orbit points when both balls certify it:
    d_H(p,q) = d_H(1, p^-1 q) needs p^-1 q in the sampled orbit."""
    w = (~p) * q
    return h_dist.get(w)


# ---------------------------------------------------------------------------
# Random subgroups


def direct_product_obstruction(graph: DefiningGraph):
    """The join decomposition with at least two infinite parts, if any: the
    obstruction to an unbounded top space (and to the random-subgroup claim)."""
    comps = []
    full = graph.full_mask
    unseen = full
    while unseen:
        v = (unseen & -unseen).bit_length() - 1
        comp = 1 << v
        frontier = [v]
        while frontier:
            u = frontier.pop()
            for w in graph.vertices(full & ~graph.adj[u] & ~comp):
                if w != u:
                    comp |= 1 << w
                    frontier.append(w)
            comp |= 1 << u
        comps.append(comp)
        unseen &= ~comp
    infinite = [c for c in comps if not graph.is_finite_parabolic(c)]
    if len(infinite) >= 2:
        return infinite
    return None


@dataclass(frozen=True)
class RandomSubgroupReport:
    generators: int
    walk_steps: int
    trials: int
    seed: int
    passes: int
    frequency: Fraction
    verdicts: tuple

    def to_json(self):
        return {
            "generators": self.generators,
            "walk_steps": self.walk_steps,
            "trials": self.trials,
            "seed": self.seed,
            "passes": self.passes,
            "frequency": str(self.frequency),
            "verdicts": list(self.verdicts),
        }


def random_subgroup_experiment(
    graph, k, steps, trials, seed, idx, table, ball, ts, h_radius=2, budget=250
):
    """Stability pass frequency of k-generated random subgroups at the given
    walk length.  Refuses graphs splitting as a direct product of two
    infinite factors (bounded top space: the stability claim is vacuous)."""
    obstruction = direct_product_obstruction(graph)
    if obstruction is not None:
        parts = [",".join(graph.subset_names(m)) for m in obstruction]
        raise ValueError(
            "refused: defining graph is a join of infinite factors "
            f"({' * '.join(parts)}), the group is a direct product of two "
            "infinite groups"
        )
    verdicts = []
    passes = 0
    for trial in range(trials):
        gens = [
            random_word(graph, steps, np.random.SeedSequence([seed, trial, i]))
            for i in range(k)
        ]
        report = stability_tritest(
            gens, idx, table, ball, ts, h_radius=h_radius, seed=seed + trial, budget=budget
        )
        verdicts.append(
            {
                "generators": [str(g) for g in gens],
                "stable": report.stable,
                "tri_verdict": report.tri_verdict,
            }
        )
        if report.stable:
            passes += 1
    return RandomSubgroupReport(
        generators=k,
        walk_steps=steps,
        trials=trials,
        seed=seed,
        passes=passes,
        frequency=Fraction(passes, trials) if trials else Fraction(0),
        verdicts=tuple(verdicts),
    )


# ---------------------------------------------------------------------------
# Hierarchy paths


def _monotonicity_defect(values):
    """Backtracking of a projected path: how far the coordinate drops below
    its running maximum (0 for an unparametrized quasigeodesic up to that
    defect)."""
    run = 0
    worst = 0
    for v in values:
        run = max(run, v)
        worst = max(worst, run - v)
    return worst


def hierarchy_path_checks(
    x, y, idx, table, ball, ts=None, relevance_factor=10, relevance_cutoff=None
):
    """Diagnostics along the normal-form geodesic from x to y: per relevant
    domain, the projected path's backtracking defect and the active-subpath
    margin (max distance from the subpath to the domain's product region);
    plus the backtracking of the image in the top space.

    A domain is relevant when its projection gap reaches the cutoff
    (relevance_factor times the recorded projection spread by default; any
    value above the consistency constant is legitimate, and the cutoff used
    is echoed in the report)."""
    path = geodesic_path(x, y)
    points = list(path.points)
    cutoff = (
        relevance_factor * max(table.xi_prime, 1)
        if relevance_cutoff is None
        else relevance_cutoff
    )
    candidates = domains_through_points(points, idx)
    relevant = []
    report = {
        "pair": [str(x), str(y)],
        "length": W.distance(x, y),
        "relevance_cutoff": cutoff,
        "domains": [],
        "top_backtrack": None,
        "margin": 0,
    }
    for dom_id in candidates:
        if dom_id == idx.top_id:
            continue
        d_total = table.dist(dom_id, x, y)
        if d_total is None or d_total < cutoff:
            continue
        relevant.append((dom_id, d_total))
    margin = 0
    graph = idx.graph
    for dom_id, d_total in relevant:
        dom = idx.domains[dom_id]
        fs = table.factor_space(dom.mask)
        nodes = [table.project(dom_id, p) for p in points]
        coords = [fs.distance(nodes[0], nd) for nd in nodes]
        backtrack = _monotonicity_defect(coords)
        moving = [i for i in range(len(points) - 1) if nodes[i] != nodes[i + 1]]
        active = points[moving[0] : moving[-1] + 2] if moving else []
        st_mask = graph.star(dom.mask)
        nu = 0
        for p in active:
            gate = W.gate(p, dom.key, st_mask)
            nu = max(nu, W.distance(p, gate))
        margin = max(margin, nu)
        report["domains"].append(
            {
                "domain": dom.label(graph),
                "projection_gap": d_total,
                "backtrack": backtrack,
                "active_points": len(active),
                "product_region_margin": nu,
            }
        )
    report["margin"] = margin
    if ts is not None:
        coords = []
        for p in points:
            d = top_distance(ts, x, p)
            if d is None:
                coords = None
                break
            coords.append(d)
        report["top_backtrack"] = (
            None if coords is None else _monotonicity_defect(coords)
        )
    return report


# ---------------------------------------------------------------------------
# Axiom estimation


@dataclass
class AxiomReport:
    delta: dict
    kappa0: int
    e_bgi: int
    theta_e: int
    theta_u: int
    alpha: int
    nu: int
    lambda_witnesses: list
    xi: int
    xi_prime: int
    samples: dict
    verdicts: dict

    def to_json(self):
        return {
            "delta": {k: v.to_json() for k, v in sorted(self.delta.items())},
            "kappa0": self.kappa0,
            "e_bgi": self.e_bgi,
            "theta_e": self.theta_e,
            "theta_u": self.theta_u,
            "alpha": self.alpha,
            "nu": self.nu,
            "lambda_witnesses": self.lambda_witnesses,
            "xi": self.xi,
            "xi_prime": self.xi_prime,
            "samples": self.samples,
            "verdicts": self.verdicts,
        }


def check_axioms(idx, table, ball, seed=0, pair_budget=400, point_budget=60):
    """Sampled estimates of the structure constants: consistency defect,
    bounded-geodesic-image defect, realization constants, active-subpath
    margin, large-links witnesses, orthogonal-family cardinality, and a
    hyperbolicity estimate per factor space.  All sampling is seeded; the
    verdicts record finiteness and the absence of counterexamples in the
    sample."""
    rng = np.random.default_rng(seed)
    graph = idx.graph
    n_dom = len(idx.domains)
    elements = ball.elements
    xs = [elements[int(i)] for i in rng.integers(0, len(elements), size=point_budget)]

    delta = {}
    for mask in idx.family:
        fs = table.factor_space(mask)
        name = ",".join(graph.subset_names(mask)) or "1"
        delta[name] = estimate_delta(fs.space, samples=50_000, seed=seed)

    kappa0 = 0
    transverse_seen = 0
    nested_seen = 0
    pairs = rng.integers(0, n_dom, size=(pair_budget, 2))
    for a, b in pairs:
        a, b = int(a), int(b)
        if a == b:
            continue
        try:
            code = idx.relation(a, b)
        except UndecidableWithinBall:
            continue
        if code == TRANSVERSE:
            transverse_seen += 1
            rho_ab, _ = table.rho(a, b)
            rho_ba, _ = table.rho(b, a)
            for x in xs[:16]:
                k = min(
                    table.dist_to_rho(b, x, rho_ab),
                    table.dist_to_rho(a, x, rho_ba),
                )
                kappa0 = max(kappa0, k)
        elif code == NESTED:
            nested_seen += 1
            rho_ab, _ = table.rho(a, b)
            st_b = graph.star(idx.domains[b].mask)
            for x in xs[:8]:
                down = W.gate(x, idx.domains[b].key, st_b)
                k = min(
                    table.dist_to_rho(b, x, rho_ab),
                    table.dist(a, x, down) or 0,
                )
                kappa0 = max(kappa0, k)

    e_bgi = 0
    bgi_samples = 0
    nested_pairs = [
        (int(a), int(b))
        for a, b in rng.integers(0, n_dom, size=(pair_budget, 2))
        if int(a) != int(b)
    ]
    for a, b in nested_pairs:
        if bgi_samples >= 40:
            break
        try:
            if idx.relation(a, b) != NESTED:
                continue
        except UndecidableWithinBall:
            continue
        fs = table.factor_space(idx.domains[b].mask)
        rho_ab, _ = table.rho(a, b)
        n_nodes = len(fs.factor_ball.elements)
        s_node = int(rng.integers(0, n_nodes))
        t_node = int(rng.integers(0, n_nodes))
        geo = _bfs_path(fs.space, s_node, t_node)
        if geo is None:
            continue
        bgi_samples += 1
        gap = min(
            min(int(fs.space.distances_from(nd)[r]) for r in rho_ab) for nd in geo
        )
        lifted = _lift_nodes(fs, idx.domains[b], geo)
        proj_nodes = [table.project(a, w) for w in lifted]
        fs_a = table.factor_space(idx.domains[a].mask)
        diam = fs_a.set_diameter(proj_nodes)
        e_bgi = max(e_bgi, min(diam, gap))

    theta_e = 0
    theta_u = 0
    alpha = 0
    orth_edges = [
        (i, j)
        for (i, j), code in idx.witnessed_relations().items()
        if code == ORTHOGONAL
    ]
    if orth_edges:
        picks = rng.integers(0, len(orth_edges), size=min(12, len(orth_edges)))
        for t in picks:
            fam = orth_edges[int(t)]
            # realization: the tuple of a genuine point over the orthogonal
            # family plus the top coordinate (a full consistent tuple, so the
            # realizer set is coarsely a point)
            y = elements[int(rng.integers(0, len(elements)))]
            coords = list(fam) + [idx.top_id]
            targets = [(v_id, table.project(v_id, y)) for v_id in coords]
            if len(elements) > 4000:
                stride = len(elements) / 4000
                pool = [elements[int(i * stride)] for i in range(4000)] + [y]
            else:
                pool = elements
            errs = []
            for x in pool:
                err = 0
                for v_id, node in targets:
                    fs = table.factor_space(idx.domains[v_id].mask)
                    err = max(err, fs.distance(table.project(v_id, x), node))
                errs.append((err, x))
            best = min(e for e, _ in errs)
            realizers = [x for e, x in errs if e <= best + 1]
            theta_e = max(theta_e, best)
            spread = max(
                (W.distance(p, q) for p in realizers for q in realizers), default=0
            )
            theta_u = max(theta_u, spread)
            # partial realization: hit the family coordinates and stay close
            # to the family's shadow in the top space
            x_star = realizers[0]
            part_err = 0
            for v_id in fam:
                fs = table.factor_space(idx.domains[v_id].mask)
                part_err = max(
                    part_err,
                    fs.distance(table.project(v_id, x_star), dict(targets)[v_id]),
                )
                rho_vs, _ = table.rho(v_id, idx.top_id)
                part_err = max(
                    part_err, table.dist_to_rho(idx.top_id, x_star, rho_vs)
                )
            alpha = max(alpha, part_err)

    # active-subpath margin; the relevance cutoff is dropped to 4 here (any
    # value above the consistency constant works, and the default ten-fold
    # projection-spread cutoff exceeds every gap a desk-sized ball can show)
    nu = 0
    for _ in range(8):
        i, j = int(rng.integers(0, len(elements))), int(rng.integers(0, len(elements)))
        rep = hierarchy_path_checks(
            elements[i], elements[j], idx, table, ball, ts=None, relevance_cutoff=4
        )
        nu = max(nu, rep["margin"])

    lam = []
    for _ in range(6):
        i, j = int(rng.integers(0, len(elements))), int(rng.integers(0, len(elements)))
        x, y = elements[i], elements[j]
        d_top = table.dist(idx.top_id, x, y)
        rel = [
            dom_id
            for dom_id in domains_through_points([x, y], idx)
            if (table.dist(dom_id, x, y) or 0) > max(table.xi_prime, 2)
        ]
        lam.append({"top_distance": d_top, "large_domains": len(rel)})

    verdicts = {
        "projections_coarse": True,
        "consistency_finite": kappa0 < 10**6,
        "bounded_geodesic_image_finite": e_bgi < 10**6,
        "realization_finite": theta_e < 10**6 and theta_u < 10**6,
        "orthogonal_cardinality_finite": idx.max_orthogonal is not None,
    }
    return AxiomReport(
        delta=delta,
        kappa0=kappa0,
        e_bgi=e_bgi,
        theta_e=theta_e,
        theta_u=theta_u,
        alpha=alpha,
        nu=nu,
        lambda_witnesses=lam,
        xi=idx.max_orthogonal or 0,
        xi_prime=table.xi_prime,
        samples={
            "seed": seed,
            "pair_budget": pair_budget,
            "point_budget": point_budget,
            "transverse_pairs": transverse_seen,
            "nested_pairs": nested_seen,
            "bgi_geodesics": bgi_samples,
        },
        verdicts=verdicts,
    )


def _bfs_path(space, s, t):
    """Deterministic geodesic in a coned graph (BFS tree with sorted
    neighbour order), as a node list, or None if disconnected."""
    if s == t:
        return [s]
    indptr, indices = space.indptr, space.indices
    prev = {s: s}
    frontier = [s]
    while frontier and t not in prev:
        nxt = []
        for v in frontier:
            for w in indices[indptr[v] : indptr[v + 1]]:
                w = int(w)
                if w not in prev:
                    prev[w] = v
                    nxt.append(w)
        frontier = nxt
    if t not in prev:
        return None
    path = [t]
    while path[-1] != s:
        path.append(prev[path[-1]])
    return path[::-1]


def _lift_nodes(fs, dom, nodes):
    """Ambient representatives of base nodes of a factor space (cone vertices
    are skipped)."""
    out = []
    inverse = {i: v for v, i in fs.vertex_map.items()}
    for nd in nodes:
        if nd >= len(fs.factor_ball.elements):
            continue
        w = fs.factor_ball.elements[nd]
        ambient = W.from_letters(
            dom.key.graph, [(inverse[v], e) for v, e in w.syllables]
        )
        out.append(dom.key * ambient)
    return out
