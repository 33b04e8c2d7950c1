"""Backend selection for the hot BFS kernels.

The compiled Cython extension is preferred when present; the pure numpy
implementation in ``_bfs_py`` is the fallback and the reference for parity
tests.  Set APOLLONIA_BACKEND=python to force the fallback.
"""

from __future__ import annotations

import os

from . import _bfs_py

KernelOverflow = _bfs_py.KernelOverflow
MonotonicityError = _bfs_py.MonotonicityError
PeriodicityError = _bfs_py.PeriodicityError

BACKEND = "python"
_impl = _bfs_py

if os.environ.get("APOLLONIA_BACKEND", "").lower() != "python":
    try:
        from . import _bfs_cy as _impl_cy

        _impl = _impl_cy
        BACKEND = "compiled"
    except ImportError:
        pass


def expand_circles(quads, last, floors, tie_run, tmax, periodic, backend=None):
    impl = _pick(backend, quads)
    return impl.expand_circles(quads, last, floors, tie_run, tmax, periodic)


def expand_vectors(vecs, last, floors, bound, gens, backend=None):
    impl = _pick(backend, vecs)
    return impl.expand_vectors(vecs, last, floors, bound, gens)


def _pick(backend, arr):
    if backend == "python" or arr.dtype == object:
        return _bfs_py
    if backend == "compiled":
        if BACKEND != "compiled":
            raise RuntimeError("compiled kernels are not available")
        return _impl
    return _impl
