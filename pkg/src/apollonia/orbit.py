"""Exact integer orbit enumeration for Apollonian-type groups in O(3,1).

Circle counts N(T), vector-orbit counts, group balls with KAK data for
every element, and log-log exponent fitting.  All word combinatorics runs
on exact integers; floating point only enters when a ball element is
handed to the KAK layer.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels, liecore
from .kernels import KernelOverflow, MonotonicityError, PeriodicityError

TMAX_CAP = 10**12
_CHUNK = 1 << 16


class NonRootInput(ValueError):
    """A generator strictly reduces the quadruple: reduce the root first."""


class FrontierExplosion(RuntimeError):
    """Ball enumeration exceeded its element cap."""


class InsufficientRange(ValueError):
    """Count curve does not span enough decades for an exponent fit."""


@dataclass(frozen=True)
class GeneratorSet:
    """Integer generator matrices, each an involution of determinant -1."""

    mats: np.ndarray  # (m, 4, 4) int64

    def __post_init__(self):
        m2 = liecore.descartes_form() * 2
        for i, S in enumerate(self.mats):
            if not np.array_equal(S @ S, np.eye(4, dtype=S.dtype)):
                raise ValueError(f"generator {i} is not an involution")
            if round(np.linalg.det(np.asarray(S, dtype=float))) != -1:
                raise ValueError(f"generator {i} must have det -1")
            Sf = np.asarray(S, dtype=float)
            if np.max(np.abs(Sf.T @ m2 @ Sf - m2)) != 0.0:
                raise ValueError(f"generator {i} does not preserve the form")

    def __len__(self) -> int:
        return len(self.mats)


def apollonian_generators() -> GeneratorSet:
    """The four Apollonian reflections acting on curvature quadruples."""
    mats = np.array(
        [
            [[-1, 2, 2, 2], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
            [[1, 0, 0, 0], [2, -1, 2, 2], [0, 0, 1, 0], [0, 0, 0, 1]],
            [[1, 0, 0, 0], [0, 1, 0, 0], [2, 2, -1, 2], [0, 0, 0, 1]],
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [2, 2, 2, -1]],
        ],
        dtype=np.int64,
    )
    return GeneratorSet(mats)


def reduce_root(q) -> tuple[int, int, int, int]:
    """Apply any generator that strictly decreases the sum until none does."""
    v = [int(x) for x in q]
    if liecore.descartes_q2(v) != 0:
        raise ValueError(f"{tuple(v)} is not on the Descartes cone")
    while True:
        total = sum(v)
        for g in range(4):
            new = 2 * total - 3 * v[g]
            if new < v[g]:
                v[g] = new
                break
        else:
            return tuple(v)


@dataclass(frozen=True)
class CountCurve:
    """Sample points (T, N) of a nondecreasing counting function."""

    T: np.ndarray
    N: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.N) < 0):
            raise ValueError("counts must be nondecreasing in T")


def geometric_grid(tmin: float, tmax: float, per_decade: int = 16) -> np.ndarray:
    npts = max(2, int(round(math.log10(tmax / tmin) * per_decade)) + 1)
    return np.geomspace(tmin, tmax, npts)


@dataclass(frozen=True)
class CircleCount:
    """Result of a packing enumeration up to curvature tmax."""

    curve: CountCurve
    curvatures: np.ndarray  # sorted, initial circles included per flags
    initial: tuple[int, ...]
    meta: dict = field(repr=False)

    def count(self, T: float) -> int:
        return int(np.searchsorted(self.curvatures, T, side="right"))


def _validate_root(root) -> tuple[int, ...]:
    root = tuple(int(x) for x in root)
    if liecore.descartes_q2(root) != 0:
        raise ValueError(f"{root} is not on the Descartes cone")
    total = sum(root)
    for g in range(4):
        if 2 * total - 3 * root[g] < root[g]:
            raise NonRootInput(
                f"generator {g + 1} reduces {root}; call reduce_root first"
            )
    return root


def _run_levels(quads, last, floors, tie_run, tmax, periodic, backend, workers):
    """Drive the level loop, chunking each level deterministically."""
    emissions = []
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        while len(quads):
            parts = [
                (quads[i : i + _CHUNK], last[i : i + _CHUNK],
                 floors[i : i + _CHUNK], tie_run[i : i + _CHUNK])
                for i in range(0, len(quads), _CHUNK)
            ]

            def step(p):
                return kernels.expand_circles(
                    p[0], p[1], p[2], p[3], tmax, periodic, backend=backend
                )

            results = list(pool.map(step, parts)) if pool else [step(p) for p in parts]
            emissions.extend(r[0] for r in results)
            quads = np.concatenate([r[1] for r in results])
            last = np.concatenate([r[2] for r in results])
            floors = np.concatenate([r[3] for r in results])
            tie_run = np.concatenate([r[4] for r in results])
    finally:
        if pool:
            pool.shutdown()
    if emissions:
        return np.concatenate(emissions)
    return np.empty(0, dtype=quads.dtype)


def enumerate_circles(
    root,
    tmax: float,
    *,
    periodic: bool = False,
    include_bounding: bool = False,
    excluded_first: int | None = None,
    grid: np.ndarray | None = None,
    per_decade: int = 16,
    backend: str | None = None,
    workers: int = 1,
) -> CircleCount:
    """Count the circles of curvature in (0, tmax] in the packing of ``root``.

    Each reduced word in the four reflections contributes the curvature of
    the circle it swaps in; the walk prunes a branch as soon as its new
    curvature exceeds tmax.  ``excluded_first`` restricts the first letter
    (0-based), which counts one ideal-triangle piece of the packing.
    ``include_bounding`` additionally counts the negative-curvature entries
    of the root; zero-curvature lines are never counted.
    """
    if tmax > TMAX_CAP:
        raise ValueError(f"tmax exceeds the supported cap {TMAX_CAP:.0e}")
    root = _validate_root(root)
    dtype = np.int64

    for attempt in (0, 1):
        try:
            rootq = np.asarray(root, dtype=dtype)
            emitted0, quads, last, floors, ties = _root_children(
                rootq, tmax, periodic, excluded_first
            )
            deeper = _run_levels(
                quads, last, floors, ties, int(tmax), periodic, backend, workers
            )
            break
        except KernelOverflow:
            if attempt:
                raise
            dtype = object
    emissions = np.concatenate([emitted0, deeper]) if len(deeper) or len(emitted0) else emitted0

    initial = [x for x in root if 0 < x <= tmax]
    if periodic:
        # Entries identified by the translation period carry equal values.
        initial = sorted(set(initial))
    if include_bounding:
        initial = sorted(initial + [x for x in root if x < 0])
    curvs = np.sort(np.concatenate([np.asarray(initial, dtype=float),
                                    emissions.astype(float)]))
    if grid is None:
        lo = max(1.0, float(curvs.min()) if len(curvs) else 1.0)
        grid = geometric_grid(lo, float(tmax), per_decade)
    counts = np.searchsorted(curvs, grid, side="right").astype(np.int64)
    meta = {
        "root": root,
        "tmax": tmax,
        "periodic": periodic,
        "include_bounding": include_bounding,
        "excluded_first": excluded_first,
        "backend": backend or kernels.BACKEND,
        "exact_dtype": "object" if dtype is object else "int64",
        "workers": workers,
    }
    return CircleCount(
        curve=CountCurve(T=grid, N=counts),
        curvatures=curvs,
        initial=tuple(initial),
        meta=meta,
    )


def _root_children(rootq, tmax, periodic, excluded_first):
    """Expand the root by hand so the first letter can be restricted."""
    total = int(rootq.sum())
    emitted, cq, cl, cf, ct = [], [], [], [], []
    for g in range(4):
        if excluded_first is not None and g == excluded_first:
            continue
        new = 2 * total - 3 * int(rootq[g])
        tie = new == int(rootq[g])
        if periodic and tie:
            continue
        if 0 < new <= tmax:
            emitted.append(new)
        if new <= tmax:
            q = rootq.copy()
            q[g] = new
            cq.append(q)
            cl.append(g)
            cf.append(new)
            ct.append(1 if tie else 0)
    quads = np.stack(cq) if cq else np.empty((0, 4), dtype=rootq.dtype)
    return (
        np.asarray(emitted, dtype=rootq.dtype),
        quads,
        np.asarray(cl, dtype=np.int8),
        np.asarray(cf, dtype=rootq.dtype),
        np.asarray(ct, dtype=np.int8),
    )


def ideal_triangle_count(root, tmax: float, excluded_first: int, **kw) -> CircleCount:
    """Packing count restricted to words whose first letter differs.

    The excluded letter is the reflection that would flip the smallest
    circle out of the triangle (index 0-based).
    """
    return enumerate_circles(root, tmax, excluded_first=excluded_first, **kw)


# ----------------------------------------------------------------------
# Vector orbits.

_NORMS = {
    "linf": (lambda w: np.abs(w).max(axis=1).astype(float), 1.0),
    "l2": (lambda w: np.sqrt((w.astype(float) ** 2).sum(axis=1)), 1.0),
}


def orbit_vector_count(
    gens: GeneratorSet,
    v,
    T: float,
    norm="linf",
    *,
    parity: str = "all",
    collect: bool = False,
    backend: str | None = None,
    max_depth: int | None = None,
    linf_lower: float = 1.0,
):
    """Number of distinct orbit vectors w = gamma v with ||w|| < T.

    Distinct-vector deduplication realizes the count of cosets of the
    stabilizer.  ``parity`` restricts to even- or odd-length words (their
    vector classes may overlap; each is deduplicated separately).  ``norm``
    is 'linf', 'l2', or a callable on rows; a callable must dominate
    ``linf_lower`` times the sup norm so pruning stays safe.
    """
    v = tuple(int(x) for x in v)
    if T > TMAX_CAP:
        raise ValueError(f"T exceeds the supported cap {TMAX_CAP:.0e}")
    if callable(norm):
        norm_fn, scale = norm, linf_lower
    else:
        norm_fn, scale = _NORMS[norm]
    bound = int(math.floor(T / scale))  # prune: max|entry| <= bound

    dtype = np.int64
    for attempt in (0, 1):
        try:
            found = _vector_walk(
                gens, v, T, bound, norm_fn, parity, dtype, backend, max_depth
            )
            break
        except KernelOverflow:
            if attempt:
                raise
            dtype = object

    if collect:
        return found
    return {p: len(s) for p, s in found.items()} if parity == "both" else len(
        found[0 if parity in ("all", "even") else 1]
    )


def _vector_walk(gens, v, T, bound, norm_fn, parity, dtype, backend, max_depth):
    want = {"all": (0,), "even": (0,), "odd": (1,), "both": (0, 1)}[parity]
    per_parity = parity != "all"
    seen = {0: set(), 1: set()}
    found = {0: set(), 1: set()}

    def visit(rows, p):
        key_p = p if per_parity else 0
        fresh = []
        norms = norm_fn(np.asarray(rows, dtype=float)) if len(rows) else []
        for row, nv in zip(rows, norms):
            t = tuple(int(x) for x in row)
            if t in seen[key_p]:
                continue
            seen[key_p].add(t)
            fresh.append(row)
            if nv < T and (key_p in want or not per_parity):
                found[key_p].add(t)
        if not fresh:
            return np.empty((0, 4), dtype=dtype)
        return np.stack(fresh).astype(dtype, copy=False)

    vec0 = np.asarray(v, dtype=dtype)
    level = visit(vec0[None, :], 0)
    last = np.full(len(level), -1, dtype=np.int8)
    floors = np.zeros(len(level), dtype=dtype)
    depth = 0
    while len(level):
        if max_depth is not None and depth >= max_depth:
            break
        childs, clast, cfloors = kernels.expand_vectors(
            level, last, floors, bound, gens.mats.astype(dtype, copy=False),
            backend=backend,
        )
        depth += 1
        keep_rows = visit(childs, depth % 2)
        if len(keep_rows) == 0:
            break
        # visit() may drop rows; rebuild the metadata by re-matching.
        idx = _match_rows(childs, keep_rows)
        level, last, floors = keep_rows, clast[idx], cfloors[idx]
    return found


def _match_rows(childs, keep_rows):
    if len(childs) == len(keep_rows):
        return np.arange(len(childs))
    lookup = {}
    for i, row in enumerate(childs):
        lookup.setdefault(tuple(int(x) for x in row), i)
    return np.array([lookup[tuple(int(x) for x in r)] for r in keep_rows])


# ----------------------------------------------------------------------
# Group balls.

@dataclass
class GroupBall:
    """All nonidentity even words gamma with conjugated norm < T.

    ``mats`` holds the exact integer matrices on the Descartes side;
    norms and KAK data refer to conj^{-1} (q gamma q) conj on the J side.
    The identity (t = 0) is excluded: its KAK factors are undefined and
    it is gauge-flagged in every bisector sum.
    """

    mats: np.ndarray        # (n, 4, 4) int64
    norms: np.ndarray       # (n,) float, e^t
    word_len: np.ndarray    # (n,) int32
    t: np.ndarray           # (n,)
    dir1: np.ndarray        # (n, 3)
    dir2: np.ndarray        # (n, 3)
    T: float
    conjugator: np.ndarray  # (4, 4) float, J side
    meta: dict = field(repr=False, default_factory=dict)

    def __len__(self) -> int:
        return len(self.norms)

    def restricted(self, T: float) -> "GroupBall":
        if T > self.T:
            raise ValueError(f"ball only extends to norm {self.T}")
        m = self.norms < T
        return GroupBall(
            self.mats[m], self.norms[m], self.word_len[m],
            self.t[m], self.dir1[m], self.dir2[m], T, self.conjugator,
            dict(self.meta, restricted_from=self.T),
        )

    def k2inv_euler(self) -> np.ndarray:
        """Euler triples of k2^{-1} for each element (computed on demand)."""
        if "k2inv_euler" not in self.meta:
            self.meta["k2inv_euler"] = _batch_k2inv_euler(
                self.mats, self.conjugator, self.t, self.dir1
            )
        return self.meta["k2inv_euler"]


def group_ball(
    gens: GeneratorSet,
    T: float,
    conjugator: np.ndarray | None = None,
    *,
    safety: float = 4.0,
    max_elements: int = 6_000_000,
    workers: int = 1,
    check_exact: bool = True,
) -> GroupBall:
    """Enumerate the even-word group ball of conjugated norm < T.

    Words expand in length until every frontier element has norm above
    T * safety; branches below the threshold keep growing because the norm
    is not monotone in word length.  The meta dict records the discarded
    frontier statistics, bounding the possible undercount empirically.
    """
    q = liecore.q_conjugator()
    G = np.eye(4) if conjugator is None else np.asarray(conjugator, dtype=float)
    Ginv = liecore.lorentz_inv(G)
    a_vec = (Ginv @ q)[3, :]
    b_vec = (q @ G)[:, 3]

    mats = np.eye(4, dtype=np.int64)[None, :, :]
    last = np.full(1, -1, dtype=np.int8)
    out_mats, out_norms, out_len = [], [], []
    n_emitted = 0
    discarded = 0
    disc_min, disc_max = math.inf, 0.0
    depth = 0
    gmats = gens.mats
    while len(mats):
        depth += 1
        cm, cl = [], []
        for g in range(len(gmats)):
            mask = last != g
            if not mask.any():
                continue
            prod = np.einsum("nij,jk->nik", mats[mask], gmats[g])
            if np.abs(prod).max() >= kernels._bfs_py.INT_GUARD:
                raise KernelOverflow("ball entries exceeded the int64 window")
            cm.append(prod)
            cl.append(np.full(int(mask.sum()), g, dtype=np.int8))
        if not cm:
            break
        mats = np.concatenate(cm)
        last = np.concatenate(cl)
        c44 = np.einsum("i,nij,j->n", a_vec, mats.astype(float), b_vec)
        if np.any(c44 < 1.0 - 1e-9):
            raise RuntimeError("non-orthochronous element in ball walk")
        c44 = np.maximum(c44, 1.0)
        norms = c44 + np.sqrt(c44 * c44 - 1.0)
        if depth % 2 == 0:
            sel = (norms < T) & (norms > 1.0 + 1e-12)
            if sel.any():
                out_mats.append(mats[sel])
                out_norms.append(norms[sel])
                out_len.append(np.full(int(sel.sum()), depth, dtype=np.int32))
                n_emitted += int(sel.sum())
                if n_emitted > max_elements:
                    raise FrontierExplosion(
                        f"ball exceeded {max_elements} elements"
                    )
        live = norms <= T * safety
        ndisc = int((~live).sum())
        if ndisc:
            discarded += ndisc
            disc_min = min(disc_min, float(norms[~live].min()))
            disc_max = max(disc_max, float(norms[~live].max()))
        mats, last = mats[live], last[live]
        if len(mats) > max_elements:
            raise FrontierExplosion(f"frontier exceeded {max_elements} elements")

    if out_mats:
        mats_all = np.concatenate(out_mats)
        norms_all = np.concatenate(out_norms)
        len_all = np.concatenate(out_len)
    else:
        mats_all = np.empty((0, 4, 4), dtype=np.int64)
        norms_all = np.empty(0)
        len_all = np.empty(0, dtype=np.int32)

    if len(mats_all):
        flat = mats_all.reshape(len(mats_all), 16)
        if len(np.unique(flat, axis=0)) != len(flat):
            raise RuntimeError(
                "duplicate ball elements: free-product structure violated"
            )
        if check_exact:
            _check_form_exact(mats_all)

    t, dir1, dir2 = _batch_kak(mats_all, G)
    meta = {
        "safety": safety,
        "discarded": discarded,
        "discarded_norm_min": disc_min if discarded else None,
        "discarded_norm_max": disc_max if discarded else None,
        "max_word_len": int(len_all.max()) if len(len_all) else 0,
        "workers": workers,
    }
    return GroupBall(
        mats=mats_all, norms=norms_all, word_len=len_all,
        t=t, dir1=dir1, dir2=dir2, T=T, conjugator=G, meta=meta,
    )


def _check_form_exact(mats: np.ndarray) -> None:
    """L^T (2 G_D) L == 2 G_D as exact integers, for every element."""
    g2 = (2 * liecore.descartes_form()).astype(np.int64)
    if np.abs(mats).max() < 1 << 25:
        lhs = np.einsum("nji,jk,nkl->nil", mats, g2, mats)
        if not np.array_equal(lhs, np.broadcast_to(g2, lhs.shape)):
            raise RuntimeError("ball element does not preserve the form")
    else:
        for M in mats:
            Mo = M.astype(object)
            if not np.array_equal(Mo.T.dot(g2.astype(object)).dot(Mo), g2):
                raise RuntimeError("ball element does not preserve the form")


def _batch_kak(mats: np.ndarray, G: np.ndarray):
    """t, dir1, dir2 of conj^{-1} (q M q) conj for stacked integer matrices."""
    if not len(mats):
        return np.empty(0), np.empty((0, 3)), np.empty((0, 3))
    q = liecore.q_conjugator()
    Ginv = liecore.lorentz_inv(G)
    A = Ginv @ q
    B = q @ G
    betas = np.einsum("ij,njk,kl->nil", A, mats.astype(float), B)
    c = np.maximum(betas[:, 3, 3], 1.0)
    t = np.arccosh(c)
    sh = np.sinh(np.maximum(t, 1e-300))
    dir1 = betas[:, :3, 3] / sh[:, None]
    dir2 = betas[:, 3, :3] / sh[:, None]
    return t, dir1, dir2


def _batch_k2inv_euler(mats, G, t, dir1):
    """Euler triples (phi, theta, psi) of k2^{-1}, vectorized."""
    if not len(mats):
        return np.empty((0, 3))
    q = liecore.q_conjugator()
    Ginv = liecore.lorentz_inv(G)
    betas = np.einsum("ij,njk,kl->nil", Ginv @ q, mats.astype(float), q @ G)
    th1 = np.arccos(np.clip(dir1[:, 0], -1.0, 1.0))
    ph1 = np.arctan2(dir1[:, 2], -dir1[:, 1])
    k1 = _batch_rotation(ph1, th1)
    n = len(mats)
    boost_inv = np.tile(np.eye(4), (n, 1, 1))
    ch, sh = np.cosh(t), np.sinh(t)
    boost_inv[:, 0, 0] = boost_inv[:, 3, 3] = ch
    boost_inv[:, 0, 3] = boost_inv[:, 3, 0] = -sh
    k2 = np.einsum("nij,nkj,nkl->nil", boost_inv, k1, betas)
    k2inv = np.swapaxes(k2, 1, 2)[:, :3, :3]
    return _batch_euler(k2inv)


def _batch_rotation(phi, theta):
    """rot_pole(phi) @ rot_equator(theta) for stacked angles, as 4x4 blocks."""
    n = len(phi)
    R = np.tile(np.eye(4), (n, 1, 1))
    cp, sp, ct, st = np.cos(phi), np.sin(phi), np.cos(theta), np.sin(theta)
    R[:, 0, 0] = ct
    R[:, 0, 1] = st
    R[:, 1, 0] = -cp * st
    R[:, 1, 1] = cp * ct
    R[:, 1, 2] = sp
    R[:, 2, 0] = sp * st
    R[:, 2, 1] = -sp * ct
    R[:, 2, 2] = cp
    return R


def _batch_euler(M):
    """Euler angles of stacked 3x3 rotations, gauge phi = 0 at the poles."""
    ct = np.clip(M[:, 0, 0], -1.0, 1.0)
    theta = np.arccos(ct)
    degen = (np.abs(M[:, 1, 0]) < 1e-13) & (np.abs(M[:, 2, 0]) < 1e-13)
    phi = np.where(degen, 0.0, np.arctan2(M[:, 2, 0], -M[:, 1, 0]))
    cph, sph = np.cos(phi), np.sin(phi)
    st = np.sin(theta)
    # rest = rot_eq(-theta) rot_pole(-phi) M equals rot_pole(psi);
    # read psi off its middle row.
    y1 = cph[:, None] * M[:, 1, :] - sph[:, None] * M[:, 2, :]
    rest1 = st[:, None] * M[:, 0, :] + ct[:, None] * y1
    psi = np.arctan2(rest1[:, 2], rest1[:, 1])
    return np.stack([phi, theta, psi], axis=1)


# ----------------------------------------------------------------------
# Exponent fitting.

@dataclass(frozen=True)
class ExponentFit:
    delta: float
    stderr: float
    n_points: int
    window: tuple[float, float]


def fit_exponent(curve: CountCurve, *, decades: float = 2.0,
                 min_points: int = 8) -> ExponentFit:
    """Log-log least squares over the top ``decades`` of T."""
    mask = (curve.N > 0) & (curve.T >= curve.T.max() / 10**decades)
    if mask.sum() < min_points:
        raise InsufficientRange(
            f"only {int(mask.sum())} usable points in the fit window"
        )
    x = np.log(curve.T[mask])
    y = np.log(curve.N[mask].astype(float))
    # Allow one grid step of slack at the window edge.
    if x.max() - x.min() < (decades - 0.25) * math.log(10):
        raise InsufficientRange("fit window spans too little of T")
    n = len(x)
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    resid = y - (ym + slope * (x - xm))
    dof = max(n - 2, 1)
    stderr = float(math.sqrt(float(resid @ resid) / dof / sxx))
    return ExponentFit(
        delta=slope, stderr=stderr, n_points=n,
        window=(float(curve.T[mask].min()), float(curve.T[mask].max())),
    )
