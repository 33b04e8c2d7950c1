"""Empirical boundary measures, harmonic moments, and bisector sums.

The empirical measure of a group ball places an atom of weight e^{-s t} at
the boundary direction dir1 of every element; as the ball radius grows
these measures converge (weak-*) to the conformal measure of the group.
Balls are inverse-closed, so the dir1 and dir2 atom families coincide as
weighted sets and a single measure serves both factors of a bisector sum.

Normalization: all acceptance-grade checks use probability-normalized
moments and ratios.  Where an absolute constant is unavoidable it is
calibrated once from the trivial-index bisector sum (the plain ball
count) and labeled as such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import harmonics, liecore, orbit


class EmptyBall(ValueError):
    """No group elements below the requested norm."""


@dataclass
class EmpiricalMeasure:
    """Weighted atoms on the boundary sphere."""

    dirs: np.ndarray      # (n, 3) unit vectors
    weights: np.ndarray   # (n,) nonnegative
    s: float
    total_weight: float

    def __post_init__(self):
        if len(self.weights) and self.weights.min() < 0:
            raise ValueError("negative atom weight")

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(self, values: np.ndarray) -> complex:
        """Probability-normalized integral of sampled values."""
        return complex(np.sum(values * self.weights) / self.total_weight)


def ps_approx(ball: orbit.GroupBall, s: float, side: str = "dir1") -> EmpiricalMeasure:
    """Empirical conformal measure: atom e^{-s t(gamma)} at dir1(gamma).

    ``side='dir2'`` places atoms at dir2 instead; because inversion maps
    dir1(gamma^{-1}) to -dir2(gamma), the dir2 family is the antipodal
    image of the dir1 family, which is what the k2 factor of a bisector
    sum equidistributes to.
    """
    if len(ball) == 0:
        raise EmptyBall(f"ball of radius {ball.T} is empty")
    w = ball.norms ** (-s)
    dirs = ball.dir1 if side == "dir1" else ball.dir2
    return EmpiricalMeasure(
        dirs=dirs, weights=w, s=s, total_weight=float(w.sum())
    )


def moment(measure: EmpiricalMeasure, a: int, b: int) -> complex:
    """Probability-normalized harmonic moment <Y_ab, measure>."""
    return measure.integrate(harmonics.sph_harm_dir(a, b, measure.dirs))


def moment_table(measure: EmpiricalMeasure, amax: int) -> dict[tuple[int, int], complex]:
    return {
        (a, b): moment(measure, a, b)
        for a in range(amax + 1)
        for b in range(-a, a + 1)
    }


# ----------------------------------------------------------------------
# Bisector sums and the leading-term prediction.

def bisector_sum(ball: orbit.GroupBall, index: harmonics.BisectorIndex,
                 T: float | None = None) -> complex:
    """sum over |gamma| < T of Y_{a1 b1}(k1) conj(Y_{a;bc}(k2^{-1})).

    The all-zero index returns the plain ball count.  Elements with t at
    the degeneracy threshold are excluded by construction of the ball.
    """
    b = ball if T is None else ball.restricted(T)
    if len(b) == 0:
        return 0.0 + 0.0j
    vals = harmonics.bisector_harmonic_arrays(
        index, b.dir1, b.dir2,
        b.k2inv_euler() if index.c != 0 else None,
    )
    return complex(_pairwise_sum(vals))


def _pairwise_sum(vals: np.ndarray) -> complex:
    # numpy reduces pairwise; fixed chunking keeps the result independent
    # of any worker partitioning used upstream.
    return complex(np.sum(vals))


@dataclass(frozen=True)
class MainTermPrediction:
    value: complex
    calibrated: bool
    calibration: float


def main_term_predict(
    measure_left: EmpiricalMeasure,
    measure_right: EmpiricalMeasure,
    index: harmonics.BisectorIndex,
    delta: float,
    T: float,
    calibration: float | None = None,
) -> MainTermPrediction:
    """Leading-term prediction pi T_psl^{2 delta}/(delta(delta-1)) nu(a1,b1) conj(nu(a,b)).

    ``T`` is the ball cutoff in the Lorentz norm e^t; the prediction uses
    its square root (the PSL-side norm), so T_psl^{2 delta} = T^delta.
    With probability-normalized moments the absolute scale is meaningless;
    pass ``calibration`` (from ``trivial_calibration``) to pin it.
    """
    if index.c != 0:
        raise ValueError("the leading term is only nonzero for c = 0")
    mu_left = moment(measure_left, index.a1, index.b1)
    mu_right = moment(measure_right, index.a, index.b)
    tpsl = math.sqrt(T)
    raw = (
        math.pi / (delta * (delta - 1.0))
        * mu_left * np.conj(mu_right) * tpsl ** (2.0 * delta)
    )
    cal = 1.0 if calibration is None else calibration
    return MainTermPrediction(
        value=complex(cal * raw), calibrated=calibration is not None,
        calibration=cal,
    )


def trivial_calibration(ball: orbit.GroupBall, delta: float) -> float:
    """Scalar matching the trivial-index prediction to the ball count."""
    count = float(len(ball))
    raw = math.pi / (delta * (delta - 1.0)) * math.sqrt(ball.T) ** (2.0 * delta)
    return count / raw


# ----------------------------------------------------------------------
# Packing constant estimation.

@dataclass(frozen=True)
class CPTerm:
    """One conjugate-class contribution to the packing constant."""

    value: float
    boundary_factor: float   # probability integral of (2/(1+n1))^delta
    norm_factor: float       # probability integral of ||G(n,1)||^{-delta}
    mass_sq: float           # calibrated squared measure mass
    n_atoms: int
    warning: str | None = None


def c_p_term(
    ball: orbit.GroupBall,
    delta: float,
    *,
    norm: str = "linf",
    region_mask=None,
    period_area: float | None = None,
) -> CPTerm:
    """(pi/(delta(delta-1))) M^2 I1 I2 for one conjugated group.

    I1 integrates (2/(1+n1))^delta, the chart factor (|z|^2+1)^delta at
    the stabilized null direction; I2 integrates ||G(n,1)||^{-delta} for
    the counting norm; M^2 is calibrated from the ball count.  The two
    integrals use the dir1 and dir2 atom families respectively (equal as
    weighted sets for inverse-closed balls).  ``region_mask`` restricts
    I1, e.g. to the ideal-triangle half-space.
    """
    measure = ps_approx(ball, delta)
    q = liecore.q_conjugator()

    n1 = ball.dir2[:, 0]
    f1 = (2.0 / np.maximum(1.0 + n1, 1e-14)) ** delta
    warning = None
    if np.max(1.0 + n1) > 0 and np.min(1.0 + n1) < 1e-9:
        warning = "boundary-factor integrand unbounded on atom support"
    if region_mask is not None:
        f1 = f1 * region_mask
    I1 = float(np.sum(f1 * measure.weights) / measure.total_weight)
    if period_area is not None:
        I1 *= period_area

    pts = np.concatenate(
        [ball.dir1, np.ones((len(ball), 1))], axis=1
    ) @ (q @ ball.conjugator).T
    if norm == "linf":
        nrm = np.abs(pts).max(axis=1)
    elif norm == "l2":
        nrm = np.sqrt((pts**2).sum(axis=1))
    else:
        nrm = norm(pts)
    I2 = float(np.sum(nrm ** (-delta) * measure.weights) / measure.total_weight)

    mass_sq = len(ball) * delta * (delta - 1.0) / (
        math.pi * math.sqrt(ball.T) ** (2.0 * delta)
    )
    value = math.pi / (delta * (delta - 1.0)) * mass_sq * I1 * I2
    return CPTerm(
        value=value, boundary_factor=I1, norm_factor=I2,
        mass_sq=mass_sq, n_atoms=len(ball), warning=warning,
    )


def conjugator_for_root(root) -> np.ndarray:
    """J-side g with g u = v for u = (1,0,0,1) and v the root quadruple."""
    v = np.asarray(
        liecore.q_conjugator() @ np.asarray(root, dtype=float)
    )
    if v[3] <= 0:
        raise ValueError("root must be future-pointing")
    n = v[:3] / v[3]
    th, ph = liecore.spherical_angles(n)
    return liecore.rotation_from_euler(ph, th) @ liecore.boost(math.log(v[3]))


@dataclass(frozen=True)
class CPEstimate:
    value: float
    even_term: CPTerm
    odd_term: CPTerm
    delta: float
    T: float
    calibrated: bool = True


def apollonian_cp(
    root,
    T: float,
    delta: float,
    *,
    norm: str = "linf",
    gens: orbit.GeneratorSet | None = None,
    region_mask_fn=None,
    **ball_kw,
) -> CPEstimate:
    """Packing-constant estimate: even-word term plus the odd-word term
    realized on S1 root, each from its conjugated group ball."""
    gens = gens or orbit.apollonian_generators()
    G = conjugator_for_root(root)
    S1_J = liecore.to_lorentz(gens.mats[0])
    terms = []
    for conj in (G, S1_J @ G):
        ball = orbit.group_ball(gens, T, conjugator=conj, **ball_kw)
        mask = region_mask_fn(ball) if region_mask_fn is not None else None
        terms.append(c_p_term(ball, delta, norm=norm, region_mask=mask))
    return CPEstimate(
        value=terms[0].value + terms[1].value,
        even_term=terms[0], odd_term=terms[1], delta=delta, T=T,
    )


# ----------------------------------------------------------------------
# Poisson-kernel derivative check.

def poisson_derivative_check(
    delta: float, n_theta: int = 32, n_phi: int = 32, eps: float = 1e-5
) -> float:
    """Max grid residual of the first-order boundary expansion of P^delta.

    Moves the ball-model center along the raising direction -(f + I if)
    by central finite differences and compares against
    -delta sin(theta) e^{i phi} on an (n_theta, n_phi) boundary grid.
    """
    u = np.linspace(0.0, math.pi, n_theta)
    v = np.linspace(0.0, 2 * math.pi, n_phi, endpoint=False)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    xi = np.stack(
        [np.sin(uu) * np.cos(vv), np.sin(uu) * np.sin(vv), np.cos(uu)], axis=-1
    )

    def ball_point(m: liecore.MoebiusElement) -> np.ndarray:
        p = liecore.iota(m)[:, 3]
        return liecore.TO_BALL_FRAME @ liecore.hyperboloid_to_ball(p)

    def pk_delta(x: np.ndarray) -> np.ndarray:
        d2 = ((xi - x) ** 2).sum(axis=-1)
        return ((1.0 - float(x @ x)) / d2) ** delta

    def fd(make):
        return (pk_delta(ball_point(make(eps))) - pk_delta(ball_point(make(-eps)))) / (
            2.0 * eps
        )

    d_f = fd(lambda e: liecore.MoebiusElement(1.0, 0.0, e, 1.0))
    d_if = fd(lambda e: liecore.MoebiusElement(1.0, 0.0, 1j * e, 1.0))
    lhs = -(d_f + 1j * d_if)
    rhs = -delta * np.sin(uu) * np.exp(1j * vv)
    return float(np.max(np.abs(lhs - rhs)))


# ----------------------------------------------------------------------
# Conjugated-measure pushforward check.

def conjugated_measure_residual(
    gens: orbit.GeneratorSet,
    G: np.ndarray,
    T: float,
    s: float,
    amax: int = 2,
) -> float:
    """Max moment gap between the measure of G^{-1} Gamma G and the
    Jacobian-weighted pushforward of Gamma's measure.

    Both sides are probability-normalized; the gap reflects the finite
    ball radius (atoms near the cutoff differ) and is recorded rather
    than driven to zero.
    """
    ball_g = orbit.group_ball(gens, T)
    ball_b = orbit.group_ball(gens, T, conjugator=G)
    mu_b = ps_approx(ball_b, s)

    Ginv = liecore.lorentz_inv(G)
    gj_ball = liecore.hyperboloid_to_ball(G[:, 3])
    base = ps_approx(ball_g, s)
    pushed = np.stack([liecore.boundary_action(Ginv, n) for n in base.dirs])
    pk = np.array(
        [liecore.poisson_kernel_point(gj_ball, n) for n in base.dirs]
    )
    w = base.weights * pk**s
    pf = EmpiricalMeasure(
        dirs=pushed, weights=w, s=s, total_weight=float(w.sum())
    )

    worst = 0.0
    for a in range(amax + 1):
        for b in range(-a, a + 1):
            worst = max(worst, abs(moment(mu_b, a, b) - moment(pf, a, b)))
    return worst
