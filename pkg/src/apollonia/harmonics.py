"""Spherical harmonics on K/M and Wigner-type harmonics on K.

All harmonics are orthonormal under *probability* Haar measure (every
compact group has measure 1 here), so Y_ab is sqrt(4 pi) times the
unit-sphere-orthonormal convention; Y_00 = 1 and Y_10 = sqrt(3) cos(theta).
Condon-Shortley phases are baked into the Wigner little-d values.

Spherical angles follow the e1-pole chart of ``liecore``: a point of K/M
with angles (theta, phi) is rot_pole(phi) rot_equator(theta) applied to e1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import liecore


@dataclass(frozen=True)
class HarmonicIndex:
    """Index (a; b, c) of a generalized harmonic; c = 0 on K/M."""

    a: int
    b: int
    c: int = 0

    def __post_init__(self):
        if self.a < 0 or abs(self.b) > self.a or abs(self.c) > self.a:
            raise ValueError(f"invalid harmonic index {self}")


@dataclass(frozen=True)
class BisectorIndex:
    """Paired index: (a, b) weights the k2 factor, (a1, b1) the k1 factor,
    c is the shared M-weight."""

    a: int
    b: int
    a1: int
    b1: int
    c: int = 0

    def __post_init__(self):
        if abs(self.b) > self.a or abs(self.c) > self.a:
            raise ValueError(f"invalid right index in {self}")
        if abs(self.b1) > self.a1 or abs(self.c) > self.a1:
            raise ValueError(f"invalid left index in {self}")


@lru_cache(maxsize=None)
def _wigner_terms(a: int, b: int, c: int):
    """Precompute (sign, logcoef, cos-power, sin-power) for d^a_{bc}."""
    if abs(b) > a or abs(c) > a:
        raise ValueError(f"invalid Wigner index ({a},{b},{c})")
    pref = 0.5 * (
        math.lgamma(a + c + 1)
        + math.lgamma(a - c + 1)
        + math.lgamma(a + b + 1)
        + math.lgamma(a - b + 1)
    )
    terms = []
    for k in range(max(0, c - b), min(a + c, a - b) + 1):
        logden = (
            math.lgamma(a + c - k + 1)
            + math.lgamma(k + 1)
            + math.lgamma(a - k - b + 1)
            + math.lgamma(b - c + k + 1)
        )
        sign = -1.0 if (b - c + k) % 2 else 1.0
        terms.append((sign, pref - logden, 2 * a + c - b - 2 * k, b - c + 2 * k))
    return tuple(terms)


def wigner_d(a: int, b: int, c: int, theta):
    """Wigner little-d value d^a_{bc}(theta); accepts scalars or arrays.

    Direct half-angle sum with log-factorial prefactors; accurate to
    ~1e-12 for a up to ~20 and to a few 1e-8 near a = 32, which covers
    every tolerance used downstream.
    """
    theta = np.asarray(theta, dtype=float)
    ch = np.cos(theta / 2.0)
    sh = np.sin(theta / 2.0)
    out = np.zeros_like(ch)
    for sign, logc, pc, ps in _wigner_terms(a, b, c):
        out = out + sign * math.exp(logc) * ch**pc * sh**ps
    return out if out.ndim else float(out)


def sph_harm(idx: HarmonicIndex, theta, phi):
    """Y_ab(theta, phi), orthonormal under the probability measure on K/M."""
    if idx.c != 0:
        raise ValueError("K/M harmonics require c = 0")
    return sph_harm_ab(idx.a, idx.b, theta, phi)


def sph_harm_ab(a: int, b: int, theta, phi):
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    val = math.sqrt(2 * a + 1) * wigner_d(a, b, 0, theta) * np.exp(1j * b * phi)
    return val if np.ndim(val) else complex(val)


def gen_sph_harm(idx: HarmonicIndex, phi, theta, phi2):
    """Y_{a;bc}(phi, theta, phi2) on K, probability-Haar orthonormal.

    For c = 0 this reduces exactly to ``sph_harm`` evaluated at the K/M
    point, independent of phi2.
    """
    a, b, c = idx.a, idx.b, idx.c
    phi = np.asarray(phi, dtype=float)
    phi2 = np.asarray(phi2, dtype=float)
    val = (
        math.sqrt(2 * a + 1)
        * wigner_d(a, b, c, theta)
        * np.exp(1j * (b * phi + c * phi2))
    )
    return val if np.ndim(val) else complex(val)


def sph_harm_dir(a: int, b: int, dirs: np.ndarray):
    """Y_ab evaluated at unit vectors (n, 3); vectorized."""
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    theta = np.arccos(np.clip(dirs[:, 0], -1.0, 1.0))
    phi = np.arctan2(dirs[:, 2], -dirs[:, 1])
    return sph_harm_ab(a, b, theta, phi)


def bisector_harmonic(idx: BisectorIndex, kakdata: liecore.KAKData) -> complex:
    """Y_{a1 a; b1 b c}(K(g)) evaluated on KAK data.

    For c = 0 this is Y_{a1 b1}(dir1) * conj(Y_{ab}(dir2)); for c != 0 the
    full Euler angles enter through the psi = 0 gauge on k1, with all of M
    absorbed into k2.
    """
    if idx.c == 0:
        left = sph_harm_dir(idx.a1, idx.b1, kakdata.dir1)[0]
        right = sph_harm_dir(idx.a, idx.b, kakdata.dir2)[0]
        return complex(left * np.conj(right))
    if kakdata.t <= 1e-8:
        raise ValueError("c != 0 bisector value is gauge-dependent at t ~ 0")
    th1, ph1 = liecore.spherical_angles(kakdata.dir1)
    left = gen_sph_harm(HarmonicIndex(idx.a1, idx.b1, idx.c), ph1, th1, 0.0)
    e = liecore.euler_from_rotation(kakdata.k2.T)
    right = gen_sph_harm(HarmonicIndex(idx.a, idx.b, idx.c), e[0], e[1], e[2])
    return complex(left * np.conj(right))


def bisector_harmonic_arrays(idx: BisectorIndex, dir1, dir2,
                             k2inv_euler=None) -> np.ndarray:
    """Vectorized bisector harmonic over stacked ball data."""
    left = sph_harm_dir(idx.a1, idx.b1, dir1)
    if idx.c == 0:
        right = sph_harm_dir(idx.a, idx.b, dir2)
        return left * np.conj(right)
    if k2inv_euler is None:
        raise ValueError("c != 0 needs the k2^{-1} Euler angles")
    # Left factor keeps its psi = 0 gauge: e^{i c * 0} = 1.
    e = np.asarray(k2inv_euler)
    right = gen_sph_harm(
        HarmonicIndex(idx.a, idx.b, idx.c), e[:, 0], e[:, 1], e[:, 2]
    )
    return left * np.conj(right)


def km_gram_quadrature(amax: int, n_theta: int = 0, n_phi: int = 0):
    """Gram matrix of {Y_ab : a <= amax} by Gauss-Legendre x trapezoid.

    Returns (gram, index list).  Exact to roundoff once n_theta > amax and
    n_phi > 2 amax.
    """
    n_theta = n_theta or (2 * amax + 8)
    n_phi = n_phi or (4 * amax + 8)
    x, w = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)
    phi = 2 * math.pi * np.arange(n_phi) / n_phi
    idxs = [(a, b) for a in range(amax + 1) for b in range(-a, a + 1)]
    vals = np.empty((len(idxs), n_theta, n_phi), dtype=complex)
    for i, (a, b) in enumerate(idxs):
        vals[i] = np.outer(
            math.sqrt(2 * a + 1) * wigner_d(a, b, 0, theta),
            np.exp(1j * b * phi),
        )
    # probability measure: (1/4pi) sin(theta) dtheta dphi
    wt = w / 2.0
    gram = np.einsum("itp,jtp,t->ij", vals, np.conj(vals), wt) / n_phi
    return gram, idxs


def k_gram_quadrature(amax: int):
    """Gram matrix of {Y_{a;bc} : a <= amax} on K, probability Haar.

    Integrates over the double chart phi, phi2 in [0, 2pi), theta in
    [0, pi] with weight sin(theta)/(8 pi^2); functions with integer a
    descend to K, so the double cover integrates to the same value.
    """
    n_theta = 2 * amax + 8
    x, w = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)
    idxs = [
        (a, b, c)
        for a in range(amax + 1)
        for b in range(-a, a + 1)
        for c in range(-a, a + 1)
    ]
    dvals = {
        (a, b, c): math.sqrt(2 * a + 1) * wigner_d(a, b, c, theta)
        for (a, b, c) in idxs
    }
    n = len(idxs)
    gram = np.zeros((n, n), dtype=complex)
    wt = w / 2.0
    # Both phi integrals are exact Kronecker deltas in (b, c), so only the
    # theta quadrature is carried out numerically.
    for i, (a, b, c) in enumerate(idxs):
        for jj, (a2, b2, c2) in enumerate(idxs):
            if b == b2 and c == c2:
                gram[i, jj] = float(np.sum(wt * dvals[(a, b, c)] * dvals[(a2, b2, c2)]))
    return gram, idxs
