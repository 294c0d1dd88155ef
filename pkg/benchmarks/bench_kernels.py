"""Benchmark the hot kernels: compiled extension vs numpy fallback.

Usage: python benchmarks/bench_kernels.py [--sizes small|full]

The workloads mirror the production call sites: dense all-pairs BFS over a
Cayley-ball graph, exhaustive four-point defect maxima over its distance
matrix, and sampled quadruple scans.  Ball expansion (pure Python in both
configurations) is timed for context.
"""

import argparse
import time

import numpy as np

from hhslab import balls as B
from hhslab import kernels
from hhslab.graphs import load_graph
from pathlib import Path

DATA = Path(__file__).parent.parent / "src" / "hhslab" / "data"


def timeit(fn, repeat=3):
    best = float("inf")
    value = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        value = fn()
        best = min(best, time.perf_counter() - t0)
    return best, value


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", choices=("small", "full"), default="full")
    args = parser.parse_args()

    backends = kernels.available_backends()
    print(f"backends available: {', '.join(sorted(backends))}")
    pent = load_graph(DATA / "pentagon.ggp")
    radius = 5 if args.sizes == "small" else 6
    t_ball, ball = timeit(lambda: B.ball(pent, radius), repeat=1)
    print(f"\nball expansion (pure python, pentagon radius {radius}, "
          f"{len(ball)} elements): {t_ball:.2f}s")

    n_exh = 160 if args.sizes == "small" else 300
    sub_indptr, sub_indices = _restrict(ball, n_exh)

    results = {}
    for name, impl in sorted(backends.items()):
        t_ap, dmat = timeit(
            lambda impl=impl: kernels.all_pairs_distances(
                ball.indptr, ball.indices, impl=impl
            )
        )
        t_fp, defect = timeit(
            lambda impl=impl: kernels.four_point_defect_max(
                kernels.all_pairs_distances(sub_indptr, sub_indices, impl=impl),
                impl=impl,
            ),
            repeat=1,
        )
        quads = kernels.sample_quadruples(len(ball), 500_000, seed=0)
        t_q, sampled = timeit(
            lambda impl=impl: kernels.four_point_defect_quads(dmat, quads, impl=impl)
        )
        results[name] = (t_ap, t_fp, t_q)
        print(
            f"\n[{name}]\n"
            f"  all-pairs BFS        ({len(ball)} nodes):     {t_ap:8.3f}s\n"
            f"  four-point exhaustive ({n_exh} nodes):    {t_fp:8.3f}s  (defect/2 = {defect})\n"
            f"  four-point sampled   ({len(quads)} quads): {t_q:8.3f}s  (defect/2 = {sampled})"
        )
    if len(results) == 2:
        pure, comp = results["pure"], results["compiled"]
        print(
            "\nspeedup compiled vs pure: "
            f"all-pairs x{pure[0] / comp[0]:.1f}, "
            f"exhaustive four-point x{pure[1] / comp[1]:.1f}, "
            f"sampled four-point x{pure[2] / comp[2]:.1f}"
        )


def _restrict(ball, n):
    """Induced subgraph on the first n ball elements (ShortLex order)."""
    adj = [[] for _ in range(n)]
    for i, j, _ in ball.edges:
        if i < n and j < n:
            adj[i].append(j)
            adj[j].append(i)
    indptr = np.zeros(n + 1, dtype=np.int64)
    flat = []
    for v in range(n):
        flat.extend(sorted(adj[v]))
        indptr[v + 1] = len(flat)
    return indptr, np.asarray(flat, dtype=np.int64)


if __name__ == "__main__":
    main()
