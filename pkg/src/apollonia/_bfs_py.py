"""Pure-Python (numpy) BFS kernels; fallback backend for orbit enumeration.

Both backends implement one *level step* of the reduced-word tree walk:
every node carries its quadruple, the slot changed last (-1 at the root),
and a monotone floor (the curvature it emitted).  Children replace one slot
j != last by 2*(sum of the others) - old; the walk relies on new >= floor
along every branch and raises MonotonicityError the moment an enumerated
packing violates it.

Entries are kept below 2**61 so the compiled backend can use int64; under
the documented cap T <= 1e12 this margin is never approached.  On overflow
the caller retries with exact Python integers (dtype=object).
"""

from __future__ import annotations

import numpy as np

INT_GUARD = 2**61


class KernelOverflow(OverflowError):
    """Entries left the int64-safe window; caller should go exact."""


class MonotonicityError(RuntimeError):
    """A child curvature fell below its branch floor (non-reduced root)."""


class PeriodicityError(RuntimeError):
    """Two consecutive ties: the packing is periodic, rerun with periodic."""


def expand_circles(quads, last, floors, tie_run, tmax, periodic):
    """One BFS level of the circle tree.

    Returns (emitted, child_quads, child_last, child_floors, child_tie_run).
    ``emitted`` holds the new curvatures in (0, tmax]; children are nodes
    whose new curvature is <= tmax (descendants of larger ones stay larger).
    A child whose new curvature equals the old one (a tie) is a congruent
    but genuinely new circle; it is emitted and walked.  Two consecutive
    ties mean an infinite dihedral stabilizer, i.e. a periodic packing:
    with ``periodic`` ties are skipped entirely (quotienting out the
    translation subgroup and counting one period), otherwise the walk
    refuses to run forever and raises PeriodicityError.
    """
    n = quads.shape[0]
    sums = quads.sum(axis=1)
    emitted = []
    cq, cl, cf, ct = [], [], [], []
    for g in range(4):
        mask = last != g
        if not mask.any():
            continue
        old = quads[mask, g]
        new = 2 * sums[mask] - 3 * old
        if new.dtype != object and n and np.abs(new).max() >= INT_GUARD:
            raise KernelOverflow
        if np.any(new < floors[mask]):
            raise MonotonicityError(
                f"new curvature below branch floor at generator {g}"
            )
        tie = new == old
        if periodic:
            keep = ~tie
        else:
            if np.any(tie & (tie_run[mask] > 0)):
                raise PeriodicityError(
                    "consecutive stabilizer ties: periodic packing"
                )
            keep = np.ones(len(new), dtype=bool)
        emitted.append(new[keep & (new > 0) & (new <= tmax)])
        grow = keep & (new <= tmax)
        if grow.any():
            q = quads[mask][grow].copy()
            q[:, g] = new[grow]
            cq.append(q)
            cl.append(np.full(int(grow.sum()), g, dtype=np.int8))
            cf.append(new[grow])
            ct.append(tie[grow].astype(np.int8))
    empty_q = np.empty((0, 4), dtype=quads.dtype)
    child_quads = np.concatenate(cq) if cq else empty_q
    child_last = np.concatenate(cl) if cl else np.empty(0, dtype=np.int8)
    child_floors = np.concatenate(cf) if cf else np.empty(0, dtype=quads.dtype)
    child_tie = np.concatenate(ct) if ct else np.empty(0, dtype=np.int8)
    emit = np.concatenate(emitted) if emitted else np.empty(0, dtype=quads.dtype)
    return emit, child_quads, child_last, child_floors, child_tie


def expand_vectors(vecs, last, floors, bound, gens):
    """One BFS level of the vector-orbit walk (general involutive gens).

    gens is an (m, 4, 4) integer array acting on column vectors.  Returns
    (child_vecs, child_last, child_floors) keeping children with
    max|entry| <= bound; deduplication (which also terminates the walk on
    stabilizer ties) is the caller's job.
    """
    m = gens.shape[0]
    out_v, out_l, out_f = [], [], []
    for g in range(m):
        mask = last != g
        if not mask.any():
            continue
        w = vecs[mask].dot(gens[g].T)
        if w.dtype != object and w.size and np.abs(w).max() >= INT_GUARD:
            raise KernelOverflow
        amax = np.abs(w).max(axis=1)
        if np.any(amax < floors[mask]):
            raise MonotonicityError(f"orbit max-entry shrank at generator {g}")
        grow = amax <= bound
        if grow.any():
            out_v.append(w[grow])
            out_l.append(np.full(int(grow.sum()), g, dtype=np.int8))
            out_f.append(amax[grow])
    if not out_v:
        e = np.empty((0, 4), dtype=vecs.dtype)
        return e, np.empty(0, np.int8), np.empty(0, dtype=vecs.dtype)
    return np.concatenate(out_v), np.concatenate(out_l), np.concatenate(out_f)
