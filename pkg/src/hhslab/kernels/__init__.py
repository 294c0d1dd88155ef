"""Kernel dispatch: compiled Cython backend when built, numpy fallback otherwise.

Set HHSLAB_KERNELS=pure or HHSLAB_KERNELS=compiled to force a backend
(forcing `compiled` raises if the extension is missing).  Both backends
return identical values; only speed differs.
"""

from __future__ import annotations

import os

import numpy as np

from . import pure as _pure

_choice = os.environ.get("HHSLAB_KERNELS", "auto")
if _choice not in ("auto", "pure", "compiled"):
    raise ValueError(f"HHSLAB_KERNELS must be auto|pure|compiled, got {_choice!r}")

_impl = None
if _choice in ("auto", "compiled"):
    try:
        from hhslab import _ckernels as _impl
    except ImportError:
        if _choice == "compiled":
            raise ImportError(
                "HHSLAB_KERNELS=compiled but hhslab._ckernels is not built; "
                "reinstall with Cython available"
            ) from None
if _impl is None:
    _impl = _pure

BACKEND = _impl.BACKEND


def available_backends():
    backends = {"pure": _pure}
    try:
        from hhslab import _ckernels

        backends["compiled"] = _ckernels
    except ImportError:
        pass
    return backends


def _csr(indptr, indices):
    return (
        np.ascontiguousarray(indptr, dtype=np.int64),
        np.ascontiguousarray(indices, dtype=np.int64),
    )


def bfs_distances(indptr, indices, source, impl=None):
    indptr, indices = _csr(indptr, indices)
    return (impl or _impl).bfs_distances(indptr, indices, int(source))


def all_pairs_distances(indptr, indices, impl=None):
    indptr, indices = _csr(indptr, indices)
    return (impl or _impl).all_pairs_distances(indptr, indices)


def four_point_defect_max(dist, impl=None):
    dist = np.ascontiguousarray(dist, dtype=np.int16)
    return int((impl or _impl).four_point_defect_max(dist))


def four_point_defect_quads(dist, quads, impl=None):
    dist = np.ascontiguousarray(dist, dtype=np.int16)
    quads = np.ascontiguousarray(quads, dtype=np.int64)
    if quads.size == 0:
        return 0
    return int((impl or _impl).four_point_defect_quads(dist, quads))


def sample_quadruples(n, count, seed):
    """Seeded quadruple sample with distinct entries, shared by both backends."""
    rng = np.random.default_rng(seed)
    if n < 4:
        return np.empty((0, 4), dtype=np.int64)
    quads = rng.integers(0, n, size=(count, 4), dtype=np.int64)
    ok = (
        (quads[:, 0] != quads[:, 1])
        & (quads[:, 0] != quads[:, 2])
        & (quads[:, 0] != quads[:, 3])
        & (quads[:, 1] != quads[:, 2])
        & (quads[:, 1] != quads[:, 3])
        & (quads[:, 2] != quads[:, 3])
    )
    return quads[ok]
