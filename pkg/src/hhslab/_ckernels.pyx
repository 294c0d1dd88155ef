# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: BFS over CSR adjacency and four-point hyperbolicity defects.

Contracts match hhslab.kernels.pure exactly; parity is enforced by tests.
"""

import numpy as np

cimport numpy as cnp

BACKEND = "compiled"


def bfs_distances(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices, Py_ssize_t source):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out = np.full(n, -1, dtype=np.int32)
    cdef cnp.int32_t[::1] dist = out
    queue = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] q = queue
    cdef Py_ssize_t head = 0, tail = 0, v, w, e
    dist[source] = 0
    q[tail] = source
    tail += 1
    while head < tail:
        v = q[head]
        head += 1
        for e in range(indptr[v], indptr[v + 1]):
            w = indices[e]
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                q[tail] = w
                tail += 1
    return out


def all_pairs_distances(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out = np.empty((n, n), dtype=np.int16)
    cdef cnp.int16_t[:, ::1] dmat = out
    queue = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] q = queue
    cdef Py_ssize_t s, head, tail, v, w, e
    for s in range(n):
        for v in range(n):
            dmat[s, v] = -1
        dmat[s, s] = 0
        head = 0
        tail = 0
        q[tail] = s
        tail += 1
        while head < tail:
            v = q[head]
            head += 1
            for e in range(indptr[v], indptr[v + 1]):
                w = indices[e]
                if dmat[s, w] < 0:
                    dmat[s, w] = dmat[s, v] + 1
                    q[tail] = w
                    tail += 1
    return out


def four_point_defect_max(cnp.int16_t[:, ::1] dist):
    cdef Py_ssize_t n = dist.shape[0]
    cdef Py_ssize_t i, j, k, l
    cdef int a, b, c, hi, mid, best = 0
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                for l in range(k + 1, n):
                    a = dist[i, j] + dist[k, l]
                    b = dist[i, k] + dist[j, l]
                    c = dist[i, l] + dist[j, k]
                    if a < b:
                        a, b = b, a
                    if a < c:
                        a, c = c, a
                    mid = b if b > c else c
                    if a - mid > best:
                        best = a - mid
    return best


def four_point_defect_quads(cnp.int16_t[:, ::1] dist, cnp.int64_t[:, ::1] quads):
    cdef Py_ssize_t m = quads.shape[0]
    cdef Py_ssize_t t, i, j, k, l
    cdef int a, b, c, mid, best = 0
    for t in range(m):
        i = quads[t, 0]
        j = quads[t, 1]
        k = quads[t, 2]
        l = quads[t, 3]
        a = dist[i, j] + dist[k, l]
        b = dist[i, k] + dist[j, l]
        c = dist[i, l] + dist[j, k]
        if a < b:
            a, b = b, a
        if a < c:
            a, c = c, a
        mid = b if b > c else c
        if a - mid > best:
            best = a - mid
    return best
