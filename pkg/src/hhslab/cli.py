"""Command-line front end.

Every subcommand loads a defining graph, builds what it needs at the given
radius, writes canonical JSON (plus DOT/CSV side files where declared) into
--out, and prints a one-line summary.  Exit codes: 0 pass, 1 verdict
failure, 2 usage error, 3 resource error.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__, analysis as A, balls as B, coned as C
from . import projections as P, reports as R, structure as S, walls as WL
from . import words as W
from .balls import ResourceBudgetError, growth_sphere_sizes
from .graphs import GraphFormatError, load_graph
from .structure import ResourceBudgetError as DomainBudgetError

DATA_DIR = Path(__file__).parent / "data"


def _threads():
    raw = os.environ.get("HHSLAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise SystemExit(2)
    return max(1, n)


class Stage:
    """Lazy pipeline over one graph and radius; everything built at most once."""

    def __init__(self, args):
        self.args = args
        path = args.graph or str(DATA_DIR / "pentagon.ggp")
        self.graph_path = path
        self.graph = load_graph(path)
        self._cache = {}

    def config(self):
        a = self.args
        return {
            "graph": os.path.basename(self.graph_path),
            "radius": a.radius,
            "seed": a.seed,
            "threshold_s": a.threshold_s,
            "contraction_A": str(a.contraction_A),
            "tau_min": str(C.TAU_MIN),
            "budget": a.budget,
            "threads": _threads(),
        }

    def ball(self):
        if "ball" not in self._cache:
            self._cache["ball"] = B.ball(
                self.graph, self.args.radius, max_elements=self.args.budget
            )
        return self._cache["ball"]

    def index(self):
        if "idx" not in self._cache:
            idx = S.enumerate_domains(self.ball(), budget=self.args.budget)
            self._cache["idx"] = idx.restructure()
        return self._cache["idx"]

    def table(self, structure=P.UNBOUNDED_PRODUCTS):
        key = ("table", structure)
        if key not in self._cache:
            self._cache[key] = P.ProjectionTable(self.index(), structure)
        return self._cache[key]

    def top(self):
        if "top" not in self._cache:
            self._cache["top"] = P.top_space(self.index())
        return self._cache["top"]

    def far_top(self, cap=6000):
        """Top space over the largest affordable ball: long-range distance
        queries need a window wider than the structure radius when cosets
        are actually collapsed."""
        if "far_top" not in self._cache:
            idx = self.index()
            if not idx.collapse_masks():
                self._cache["far_top"] = self.top()
            else:
                radius = self.args.radius
                best = radius
                for r in range(radius, 25):
                    if sum(growth_sphere_sizes(self.graph, r)) > cap:
                        break
                    best = r
                ball = self.ball() if best == radius else B.ball(self.graph, best)
                self._cache["far_top"] = P.top_space(idx, over_ball=ball)
        return self._cache["far_top"]

    def walls(self):
        if "walls" not in self._cache:
            self._cache["walls"] = WL.walls(self.ball())
        return self._cache["walls"]

    def contact(self):
        if "contact" not in self._cache:
            self._cache["contact"] = WL.contact_graph(self.walls(), self.ball())
        return self._cache["contact"]

    def word(self, text):
        return W.parse_word(self.graph, text)


def _emit(stage, out, name, payload, aux=()):
    out.mkdir(parents=True, exist_ok=True)
    path = R.write_report(out, name, R.envelope(name, stage.config(), payload))
    for fname, text in aux:
        (out / fname).write_text(text, encoding="utf-8")
    print(f"{name}: wrote {path}")


def cmd_ball(stage, out):
    ball = stage.ball()
    spheres = ball.sphere_sizes()
    expected = growth_sphere_sizes(stage.graph, stage.args.radius)
    payload = {
        "elements": len(ball),
        "sphere_sizes": spheres,
        "growth_series_sizes": expected,
        "matches_growth_series": spheres == expected,
        "edges": len(ball.edges),
    }
    _emit(stage, out, "ball", payload)
    return 0 if payload["matches_growth_series"] else 1


def cmd_walls(stage, out):
    ball = stage.ball()
    ws = stage.walls()
    payload = {
        "walls": len(ws),
        "edges": len(ball.edges),
        "every_edge_in_one_wall": sum(len(w.dual_edges) for w in ws)
        == len(ball.edges),
        "table": R.wall_table_json(ws, ball),
    }
    _emit(stage, out, "walls", payload)
    return 0 if payload["every_edge_in_one_wall"] else 1


def cmd_contact(stage, out):
    cg = stage.contact()
    delta = C.estimate_delta(cg, seed=stage.args.seed)
    payload = {
        "nodes": cg.n,
        "crossing_pairs": len(cg.crossing),
        "delta": delta.to_json(),
    }
    _emit(stage, out, "contact", payload, aux=[("contact.dot", R.contact_graph_dot(cg))])
    return 0


def cmd_domains(stage, out):
    idx = stage.index()
    _emit(stage, out, "domains", idx.to_json())
    return 0


def cmd_restructure(stage, out):
    idx = stage.index()
    graph = stage.graph
    payload = {
        "domains": len(idx.domains),
        "kept_types": [list(graph.subset_names(m)) for m in idx.kept_masks()],
        "collapse_types": [list(graph.subset_names(m)) for m in idx.collapse_masks()],
        "removed_domains": len(idx.removed_ids),
        "max_orthogonal": idx.max_orthogonal,
        "verification": idx.verification,
    }
    _emit(stage, out, "restructure", payload)
    ok = (
        idx.verification["collapse_nesting_closed"]
        and idx.verification["clean_containers_failures"] == 0
    )
    return 0 if ok else 1


def cmd_cone(stage, out):
    ts = stage.top()
    epsilon = 2
    r_wit, n_wit, table = C.acylindricity_probe(ts, epsilon=epsilon, seed=stage.args.seed)
    payload = {
        "kind": ts.kind,
        "mode": ts.mode,
        "base_vertices": ts.n_base,
        "cone_vertices": len(ts.cone_labels),
        "identical_to_cayley_ball": ts.same_as_ball(),
        "collapsed": [reason for _, reason in ts.collapsed],
        "acylindricity": {
            "epsilon": epsilon,
            "witnessed_R": r_wit,
            "witnessed_N": n_wit,
            "sampled": True,
        },
    }
    _emit(
        stage, out, "cone", payload,
        aux=[
            ("top_space.dot", R.coned_graph_dot(ts)),
            ("acylindricity.csv", R.acylindricity_csv(table)),
        ],
    )
    return 0


def cmd_largest(stage, out):
    la = P.largest_action_graph(stage.index())
    ts = stage.top()
    verdict, detail = C.compare_actions(ts, la)
    payload = {
        "mode": la.mode,
        "identical_to_cayley_ball": la.same_as_ball(),
        "collapsed": [reason for _, reason in la.collapsed],
        "versus_top_space": {"verdict": verdict, "detail": detail},
    }
    _emit(stage, out, "largest", payload, aux=[("largest.dot", R.coned_graph_dot(la))])
    bad = verdict == "x<=y"  # the largest action strictly dominated: a failure
    return 1 if bad else 0


def cmd_classify(stage, out):
    g = stage.word(stage.args.word)
    space_name = stage.args.space
    if space_name == "contact":
        space = stage.contact()
    elif space_name == "largest":
        space = P.largest_action_graph(stage.index())
    elif space_name == "cayley":
        space = C.cayley_space(stage.ball())
    else:
        space = stage.top()
    n_max = stage.args.powers
    cls = C.classify_element(space, g, N=n_max)
    payload = cls.to_json()
    if space_name == "ts":
        axis = A.densify_axis(A.axis_path(g, max(3, n_max // 2)))
        con = A.is_contracting(
            axis, stage.ball(), contraction=stage.args.contraction_A,
            seed=stage.args.seed,
        )
        payload["axis_contracting"] = con.to_json()
        payload["generalized_loxodromic_consistent"] = (
            (cls.verdict == "loxodromic") == con.is_contracting
            if con.verdict != "inconclusive" and cls.verdict != "inconclusive"
            else None
        )
    _emit(stage, out, "classify", payload)
    return 0 if cls.verdict != "inconclusive" else 1


def cmd_check_axioms(stage, out):
    rep = A.check_axioms(
        stage.index(), stage.table(P.ORIGINAL), stage.ball(), seed=stage.args.seed
    )
    _emit(stage, out, "check_axioms", rep.to_json())
    return 0 if all(rep.verdicts.values()) else 1


def cmd_distance_formula(stage, out):
    fit = A.distance_formula_fit(
        stage.index(),
        stage.table(),
        stage.ball(),
        threshold=stage.args.threshold_s,
        n_pairs=stage.args.pairs,
        seed=stage.args.seed,
    )
    rng_pairs = []
    import numpy as np

    rng = np.random.default_rng(stage.args.seed)
    ball = stage.ball()
    for _ in range(min(stage.args.pairs, 200)):
        i, j = int(rng.integers(0, len(ball))), int(rng.integers(0, len(ball)))
        x, y = ball.elements[i], ball.elements[j]
        total, _ = A.projection_sum(
            x, y, stage.index(), stage.table(), stage.args.threshold_s
        )
        rng_pairs.append((W.distance(x, y), total))
    _emit(
        stage, out, "distance_formula", fit.to_json(),
        aux=[("distance_scatter.csv", R.scatter_csv(rng_pairs))],
    )
    return 0 if not fit.degenerate else 1


def cmd_contracting(stage, out):
    g = stage.word(stage.args.word)
    axis = A.densify_axis(A.axis_path(g, stage.args.powers))
    con = A.is_contracting(
        axis, stage.ball(), contraction=stage.args.contraction_A, seed=stage.args.seed
    )
    bp = A.bounded_projections(axis, stage.index(), stage.table(), which="kept")
    payload = {
        "element": str(g),
        "contracting": con.to_json(),
        "bounded_projections_over_kept": bp.to_json(),
        "equivalence_consistent": (
            con.is_contracting == bp.bounded
            if con.verdict != "inconclusive"
            else None
        ),
    }
    _emit(stage, out, "contracting", payload)
    if con.verdict == "inconclusive":
        return 1
    return 0 if payload["equivalence_consistent"] else 1


def cmd_stability(stage, out):
    gens = [stage.word(t) for t in stage.args.words]
    h_radius = 10 if len(gens) == 1 else 2
    rep = A.stability_tritest(
        gens,
        stage.index(),
        stage.table(),
        stage.ball(),
        stage.far_top(),
        h_radius=h_radius,
        seed=stage.args.seed,
    )
    _emit(stage, out, "stability", rep.to_json())
    return 0 if rep.tri_verdict == "agree" else 1


def cmd_random_subgroups(stage, out):
    a = stage.args
    try:
        rep = A.random_subgroup_experiment(
            stage.graph,
            a.k,
            a.steps,
            a.trials,
            a.seed,
            stage.index(),
            stage.table(),
            stage.ball(),
            stage.far_top(),
        )
    except ValueError as exc:
        _emit(stage, out, "random_subgroups", {"refused": str(exc)})
        print(f"random-subgroups: {exc}", file=sys.stderr)
        return 1
    _emit(stage, out, "random_subgroups", rep.to_json())
    return 0


def cmd_pentagon_report(stage, out):
    graph = stage.graph
    ball = stage.ball()
    idx = stage.index()
    checks = {}

    ws = stage.walls()
    jb = next(
        (w for w in ws if graph.names[w.label] == "b" and w.key.base.is_identity()),
        None,
    )
    if jb is not None:
        stab = WL.wall_stabilizer(jb, ball)
        star_b = graph.star(graph.mask_of("b"))
        expected = [g for g in ball.elements if not (g.support & ~star_b)]
        checks["wall_stabilizer_is_star_parabolic"] = stab == expected
    else:
        checks["wall_stabilizer_is_star_parabolic"] = False

    mask_lk_b = graph.link(graph.mask_of("b"))
    f_b, e_b = idx.boundedness.get(mask_lk_b, (None, None))
    removed_types = {idx.domains[i].mask for i in idx.removed_ids}
    checks["link_domain_factor_unbounded"] = f_b is False
    checks["link_domain_complement_bounded"] = e_b is True
    checks["link_domain_removed"] = mask_lk_b in removed_types

    checks["collapse_set_empty"] = not idx.collapse_masks()
    checks["kept_is_top_only"] = idx.kept_masks() == (graph.full_mask,)
    ts = stage.top()
    checks["top_space_identical_to_cayley_ball"] = ts.same_as_ball()

    ac = stage.word("ac")
    cg = stage.contact()
    jb_node = cg.wall_id(graph.index("b"), W.identity(graph))
    cls_contact = C.classify_element(cg, ac, N=stage.args.powers, base=jb_node)
    cls_top = C.classify_element(ts, ac, N=stage.args.powers)
    checks["ac_elliptic_on_contact_graph"] = (
        cls_contact.verdict == "elliptic" and cls_contact.orbit_diameter == 0
    )
    checks["ac_loxodromic_on_top_space"] = (
        cls_top.verdict == "loxodromic"
        and cls_top.translation_estimate == Fraction(2)
    )
    delta = C.estimate_delta(cg, seed=stage.args.seed)
    payload = {
        "checks": checks,
        "contact_delta": delta.to_json(),
        "classify_ac_contact": cls_contact.to_json(),
        "classify_ac_top": cls_top.to_json(),
        "notes": [
            "ab has order 2 here (a and b commute); the infinite-order element "
            "translating the link-domain line is ac, which is what gets tested"
        ],
    }
    _emit(stage, out, "pentagon_report", payload)
    return 0 if all(checks.values()) else 1


COMMANDS = {
    "ball": cmd_ball,
    "walls": cmd_walls,
    "contact": cmd_contact,
    "domains": cmd_domains,
    "restructure": cmd_restructure,
    "cone": cmd_cone,
    "largest": cmd_largest,
    "classify": cmd_classify,
    "check-axioms": cmd_check_axioms,
    "distance-formula": cmd_distance_formula,
    "contracting": cmd_contracting,
    "stability": cmd_stability,
    "random-subgroups": cmd_random_subgroups,
    "pentagon-report": cmd_pentagon_report,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hhslab",
        description="Cayley-ball scale geometry of graph products of cyclic groups",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--graph", help=".ggp or JSON graph file (default: shipped pentagon)")
        p.add_argument("--radius", type=int, default=6)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threshold-s", dest="threshold_s", type=int, default=10)
        p.add_argument(
            "--contraction-A",
            dest="contraction_A",
            type=Fraction,
            default=Fraction(1, 2),
        )
        p.add_argument("--out", type=Path, default=Path("hhslab-out"))
        p.add_argument("--budget", type=int, default=2_000_000)
        p.add_argument("--powers", type=int, default=6, help="max power for orbits")

    for name in COMMANDS:
        p = sub.add_parser(name)
        common(p)
        if name == "classify":
            p.add_argument("word")
            p.add_argument(
                "--space", choices=("ts", "contact", "largest", "cayley"), default="ts"
            )
        elif name == "contracting":
            p.add_argument("word")
        elif name == "stability":
            p.add_argument("words", nargs="+")
        elif name == "random-subgroups":
            p.add_argument("--k", type=int, default=2)
            p.add_argument("--steps", type=int, default=15)
            p.add_argument("--trials", type=int, default=20)
        elif name == "distance-formula":
            p.add_argument("--pairs", type=int, default=200)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.radius < 0:
        print("radius must be >= 0", file=sys.stderr)
        return 2
    try:
        stage = Stage(args)
    except (GraphFormatError, FileNotFoundError) as exc:
        print(f"graph loading failed: {exc}", file=sys.stderr)
        return 2
    try:
        return COMMANDS[args.command](stage, args.out)
    except (ResourceBudgetError, DomainBudgetError) as exc:
        print(f"{args.command}: resource budget exceeded: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
