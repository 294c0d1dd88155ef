"""Pure-numpy implementations of the hot kernels.

Same contracts as the compiled versions in hhslab._ckernels; results are
bit-identical so the two backends are interchangeable.  Graphs are CSR
adjacency (indptr/indices over vertex ids 0..n-1), distance matrices are
C-contiguous int16 with -1 for unreachable pairs.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"


def bfs_distances(indptr, indices, source):
    """Hop distances from `source`; int32 vector, -1 where unreachable."""
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int32)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    d = 0
    while frontier.size:
        d += 1
        starts = indptr[frontier]
        counts = indptr[frontier + 1] - starts
        total = int(counts.sum())
        if total == 0:
            break
        # gather all neighbours of the frontier in one shot
        offsets = np.repeat(starts - np.concatenate(([0], np.cumsum(counts)[:-1])), counts)
        nbrs = indices[offsets + np.arange(total)]
        nbrs = nbrs[dist[nbrs] < 0]
        if nbrs.size == 0:
            break
        frontier = np.unique(nbrs)
        dist[frontier] = d
    return dist


def all_pairs_distances(indptr, indices):
    """Dense hop-distance matrix (int16, -1 unreachable).  Intended for n <= ~3000."""
    n = indptr.shape[0] - 1
    out = np.empty((n, n), dtype=np.int16)
    for s in range(n):
        out[s, :] = bfs_distances(indptr, indices, s).astype(np.int16)
    return out


def four_point_defect_max(dist):
    """Exhaustive max over quadruples of (largest pairing sum - middle pairing sum).

    The returned value is twice the four-point hyperbolicity constant of the
    metric; keeping it doubled keeps it an exact integer.  O(n^4): callers
    should switch to four_point_defect_quads above a few hundred vertices.
    """
    D = np.asarray(dist, dtype=np.int32)
    n = D.shape[0]
    best = 0
    pair_k, pair_l = np.triu_indices(n, k=1)
    d_kl = D[pair_k, pair_l]
    for i in range(n):
        # quadruples (i, j, k, l) with i < j and k < l; overcounting across
        # the two pairs is harmless since the defect is permutation-invariant
        if i >= n - 1:
            break
        js = np.arange(i + 1, n)
        a = D[i, js][:, None] + d_kl[None, :]
        b = D[i, pair_k][None, :] + D[js][:, pair_l]
        c = D[i, pair_l][None, :] + D[js][:, pair_k]
        hi = np.maximum(a, np.maximum(b, c))
        lo = np.minimum(a, np.minimum(b, c))
        mid = a + b + c - hi - lo
        defect = int((hi - mid).max()) if hi.size else 0
        if defect > best:
            best = defect
    return best


def four_point_defect_quads(dist, quads):
    """Max doubled four-point defect over an explicit (m, 4) array of quadruples."""
    D = np.asarray(dist, dtype=np.int32)
    q = np.asarray(quads, dtype=np.int64)
    if q.size == 0:
        return 0
    i, j, k, l = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    a = D[i, j] + D[k, l]
    b = D[i, k] + D[j, l]
    c = D[i, l] + D[j, k]
    hi = np.maximum(a, np.maximum(b, c))
    lo = np.minimum(a, np.minimum(b, c))
    mid = a + b + c - hi - lo
    return int((hi - mid).max())
