"""Group elements of PSL(2,C) and SO°(3,1) and the maps between them.

Conventions used throughout the package:

* The quadratic form on R^4 is J = diag(1,1,1,-1) with coordinates
  (x, y, z, w); "orthochronous" means L[3,3] >= 1.
* The distinguished boost axis is e1 = (1,0,0).  ``boost(t)`` acts in the
  x-w plane with entry (w,w) = cosh(t), and the bi-K-invariant norm of a
  Lorentz matrix is e^t = L[3,3] + sqrt(L[3,3]^2 - 1).
* Spherical angles of a unit 3-vector n are measured with e1 as pole:
  n(theta, phi) = (cos(theta), -sin(theta)cos(phi), sin(theta)sin(phi)),
  which is exactly rot_pole(phi) @ rot_equator(theta) applied to e1.  This
  keeps Euler-angle factorizations of rotations and point evaluations of
  harmonics literally compatible.
* The one fixed frame change to the ball-model convention (pole at the
  third coordinate) is the cyclic rotation (m1,m2,m3) -> (m2,m3,m1); see
  ``TO_BALL_FRAME``.  It is applied only where a ball-model formula is
  evaluated, never implicitly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

J_FORM = np.diag([1.0, 1.0, 1.0, -1.0])

# Treat boosts with L[3,3] - 1 below this as pure rotations.
DEGENERATE_T = 1e-12


class DegenerateRotation(ValueError):
    """KAK decomposition requested for an element with no boost part."""


@dataclass(frozen=True)
class MoebiusElement:
    """Element of PSL(2,C): a 2x2 complex matrix of det 1, modulo sign."""

    a: complex
    b: complex
    c: complex
    d: complex

    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def validate(self, tol: float = 1e-12) -> "MoebiusElement":
        if abs(self.det() - 1.0) > tol:
            raise ValueError(f"matrix is not unimodular: det = {self.det()}")
        return self

    def __matmul__(self, other: "MoebiusElement") -> "MoebiusElement":
        return MoebiusElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inv(self) -> "MoebiusElement":
        return MoebiusElement(self.d, -self.b, -self.c, self.a)

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def close_to(self, other: "MoebiusElement", tol: float = 1e-10) -> bool:
        """Equality in PSL(2,C), i.e. up to a global sign."""
        m1, m2 = self.as_array(), other.as_array()
        return bool(
            np.max(np.abs(m1 - m2)) <= tol or np.max(np.abs(m1 + m2)) <= tol
        )


def identity_moebius() -> MoebiusElement:
    return MoebiusElement(1.0, 0.0, 0.0, 1.0)


def moebius_boost(t: float) -> MoebiusElement:
    """diag(e^{t/2}, e^{-t/2}), the boost of rapidity t."""
    return MoebiusElement(math.exp(t / 2.0), 0.0, 0.0, math.exp(-t / 2.0))


def moebius_pole_rotation(phi: float) -> MoebiusElement:
    """exp(phi*Phi/2) with Phi = diag(i,-i); rotation about the pole e1."""
    return MoebiusElement(cmath.exp(0.5j * phi), 0.0, 0.0, cmath.exp(-0.5j * phi))


def moebius_equator_rotation(theta: float) -> MoebiusElement:
    """exp(theta*Theta/2) with Theta = [[0,1],[-1,0]]."""
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return MoebiusElement(c, s, -s, c)


def moebius_from_euler(phi: float, theta: float, psi: float) -> MoebiusElement:
    """Element of PSU(2) with Euler angles (phi, theta, psi)."""
    return (
        moebius_pole_rotation(phi)
        @ moebius_equator_rotation(theta)
        @ moebius_pole_rotation(psi)
    )


def random_moebius(rng: np.random.Generator, tmax: float = 1.5) -> MoebiusElement:
    """Random element k1 * a_t * k2 with t uniform in [0, tmax].

    Keeping tmax modest keeps matrix entries O(e^tmax), so absolute
    float tolerances of 1e-12 in the invariants stay meaningful.
    """
    k1 = moebius_from_euler(*rng.uniform(0, 2 * math.pi, 3))
    k2 = moebius_from_euler(*rng.uniform(0, 2 * math.pi, 3))
    return k1 @ moebius_boost(float(rng.uniform(0, tmax))) @ k2


def iota(m: MoebiusElement) -> np.ndarray:
    """The explicit isomorphism PSL(2,C) -> SO°(3,1).

    Entries are one half of the standard quadratic expressions in
    (a, b, c, d); the scale is pinned so that iota(moebius_boost(t)) is
    exactly ``boost(t)``.
    """
    m.validate()
    a, b, c, d = m.a, m.b, m.c, m.d
    ac, bc_, cc, dc = a.conjugate(), b.conjugate(), c.conjugate(), d.conjugate()
    aa, bb, cc2, dd = abs(a) ** 2, abs(b) ** 2, abs(c) ** 2, abs(d) ** 2

    L = np.empty((4, 4), dtype=float)
    L[0, 0] = aa + dd - bb - cc2
    L[0, 1] = (b * ac + a * bc_ - d * cc - c * dc).real
    L[0, 2] = (1j * (b * ac - a * bc_ - d * cc + c * dc)).real
    L[0, 3] = aa + bb - cc2 - dd
    L[1, 0] = (c * ac - d * bc_ + a * cc - b * dc).real
    L[1, 1] = (d * ac + c * bc_ + b * cc + a * dc).real
    L[1, 2] = (1j * (d * ac - c * bc_ + b * cc - a * dc)).real
    L[1, 3] = (c * ac + d * bc_ + a * cc + b * dc).real
    L[2, 0] = (1j * (-c * ac + d * bc_ + a * cc - b * dc)).real
    L[2, 1] = (1j * (-d * ac - c * bc_ + b * cc + a * dc)).real
    L[2, 2] = (d * ac - c * bc_ - b * cc + a * dc).real
    L[2, 3] = (1j * (-c * ac - d * bc_ + a * cc + b * dc)).real
    L[3, 0] = aa + cc2 - bb - dd
    L[3, 1] = (b * ac + a * bc_ + d * cc + c * dc).real
    L[3, 2] = (1j * (b * ac - a * bc_ + d * cc - c * dc)).real
    L[3, 3] = aa + bb + cc2 + dd
    return 0.5 * L


def is_lorentz(L: np.ndarray, tol: float = 1e-12) -> bool:
    """Check L^T J L = J, det = 1 and orthochronicity."""
    err = np.max(np.abs(L.T @ J_FORM @ L - J_FORM))
    return bool(err <= tol and L[3, 3] >= 1.0 - tol and np.linalg.det(L) > 0)


def lorentz_inv(L: np.ndarray) -> np.ndarray:
    """Exact inverse J L^T J of a J-orthogonal matrix."""
    return J_FORM @ L.T @ J_FORM


def boost(t: float) -> np.ndarray:
    """Boost along e1: entry (w,w) = cosh t, mixing the x and w axes."""
    ch, sh = math.cosh(t), math.sinh(t)
    B = np.eye(4)
    B[0, 0] = B[3, 3] = ch
    B[0, 3] = B[3, 0] = sh
    return B


def rot_pole(phi: float) -> np.ndarray:
    """iota(exp(phi*Phi/2)): rotation fixing the pole e1."""
    c, s = math.cos(phi), math.sin(phi)
    R = np.eye(4)
    R[1, 1] = R[2, 2] = c
    R[1, 2] = s
    R[2, 1] = -s
    return R


def rot_equator(theta: float) -> np.ndarray:
    """iota(exp(theta*Theta/2)): rotation in the (x,y) plane."""
    c, s = math.cos(theta), math.sin(theta)
    R = np.eye(4)
    R[0, 0] = R[1, 1] = c
    R[0, 1] = s
    R[1, 0] = -s
    return R


def rotation_from_euler(phi: float, theta: float, psi: float = 0.0) -> np.ndarray:
    return rot_pole(phi) @ rot_equator(theta) @ rot_pole(psi)


def sphere_point(theta: float, phi: float) -> np.ndarray:
    """Unit vector with spherical angles (theta, phi), pole at e1."""
    st = math.sin(theta)
    return np.array([math.cos(theta), -st * math.cos(phi), st * math.sin(phi)])


def spherical_angles(n) -> tuple[float, float]:
    """Inverse of sphere_point; phi = 0 at the degenerate poles."""
    n = np.asarray(n, dtype=float)
    theta = math.acos(max(-1.0, min(1.0, float(n[0]))))
    if min(abs(n[1]), abs(n[2])) == 0.0 and max(abs(n[1]), abs(n[2])) == 0.0:
        return theta, 0.0
    return theta, math.atan2(float(n[2]), -float(n[1]))


def euler_from_rotation(R: np.ndarray) -> tuple[float, float, float]:
    """Euler angles (phi, theta, psi) with R = rot_pole(phi) rot_equator(theta) rot_pole(psi).

    Accepts a 4x4 Lorentz rotation or a 3x3 block.  At theta = 0 or pi the
    pair (phi, psi) is fixed by the gauge phi = 0.
    """
    M = R[:3, :3] if R.shape == (4, 4) else R
    ct = max(-1.0, min(1.0, float(M[0, 0])))
    theta = math.acos(ct)
    if abs(M[1, 0]) < 1e-13 and abs(M[2, 0]) < 1e-13:
        # No equatorial tilt (or a half-turn): fix the gauge phi = 0.
        phi = 0.0
    else:
        phi = math.atan2(float(M[2, 0]), -float(M[1, 0]))
    rest = rot_equator(-theta)[:3, :3] @ rot_pole(-phi)[:3, :3] @ M
    psi = math.atan2(float(rest[1, 2]), float(rest[1, 1]))
    return phi, theta, psi


@dataclass(frozen=True)
class KAKData:
    """Cartan decomposition L = k1 boost(t) k2.

    dir1 = k1 e1 is the boundary direction of the K/M coset, dir2 = k2^{-1} e1
    that of the M\\K coset.  The matrices use the gauge in which k1 has Euler
    angle psi = 0, all of M being absorbed into k2; only t, dir1, dir2 and
    the product k1 k2 are gauge-independent.
    """

    t: float
    dir1: np.ndarray
    dir2: np.ndarray
    k1: np.ndarray
    k2: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.k1 @ boost(self.t) @ self.k2


def lorentz_norm(L: np.ndarray) -> float:
    """e^t = L[3,3] + sqrt(L[3,3]^2 - 1), i.e. exp of the orbital distance."""
    c = float(L[3, 3])
    if c < 1.0:
        c = 1.0
    return c + math.sqrt(c * c - 1.0)


def hyperbolic_distance(L: np.ndarray) -> float:
    """arccosh(L[3,3]) = d(j, L j)."""
    return math.acosh(max(1.0, float(L[3, 3])))


def kak(L: np.ndarray) -> KAKData:
    """KAK decomposition of an orthochronous Lorentz matrix with t > 0."""
    c = float(L[3, 3])
    if c <= 1.0 + DEGENERATE_T:
        raise DegenerateRotation(
            f"L[3,3] = {c} is too close to 1; element has no boost part"
        )
    t = math.acosh(c)
    sh = math.sinh(t)
    dir1 = np.array([L[0, 3], L[1, 3], L[2, 3]]) / sh
    dir2 = np.array([L[3, 0], L[3, 1], L[3, 2]]) / sh
    th1, ph1 = spherical_angles(dir1)
    k1 = rotation_from_euler(ph1, th1)
    k2 = boost(-t) @ k1.T @ L
    return KAKData(t=t, dir1=dir1, dir2=dir2, k1=k1, k2=k2)


def poisson_kernel(phi: float, theta: float, r: float, v: float, u: float) -> float:
    """Poisson kernel in Euler-angle parametrization of the ball model.

    (phi, theta, r) locate the interior point, (v, u) the boundary point;
    r is the ball-model radius tanh(t/2).
    """
    if r >= 1.0:
        raise ValueError(f"r = {r} is outside the open ball")
    cosang = (
        math.sin(theta) * math.cos(phi) * math.sin(u) * math.cos(v)
        + math.sin(theta) * math.sin(phi) * math.sin(u) * math.sin(v)
        + math.cos(theta) * math.cos(u)
    )
    return (1.0 - r * r) / (1.0 - 2.0 * r * cosang + r * r)


def poisson_kernel_point(x: np.ndarray, xi: np.ndarray) -> float:
    """(1 - |x|^2)/|x - xi|^2 for x in the open ball, xi on the sphere.

    Frame-invariant form of ``poisson_kernel``; the two agree when the
    angles of x and xi are taken in a common frame.
    """
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    return (1.0 - float(x @ x)) / float((x - xi) @ (x - xi))


# Fixed frame change to the ball-model convention with the pole at the
# third coordinate (used only for ball-model formula evaluations).
TO_BALL_FRAME = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])


def hyperboloid_to_ball(p: np.ndarray) -> np.ndarray:
    """Project (x, y, z, w) with w = cosh(t) to the Poincare ball."""
    return np.asarray(p[:3], dtype=float) / (1.0 + float(p[3]))


# ----------------------------------------------------------------------
# Descartes form and its conjugation to the J side.

def descartes_form() -> np.ndarray:
    """Gram matrix of Q_D(a,b,c,d) = sum a_i^2 - (sum a_i)^2 / 2."""
    return np.eye(4) - 0.5 * np.ones((4, 4))


def descartes_q2(v) -> int:
    """2 * Q_D(v) as an exact integer; zero exactly on curvature quadruples."""
    a, b, c, d = (int(x) for x in v)
    s = a + b + c + d
    return 2 * (a * a + b * b + c * c + d * d) - s * s


def q_conjugator() -> np.ndarray:
    """The symmetric involution q with q S q mapping O_{Q_D} to the J side.

    Entries are exact in binary floating point (all +-1/2), so conjugating
    integer matrices stays exact well past any T this package caps at.
    """
    return 0.5 * np.array(
        [
            [1.0, -1.0, -1.0, 1.0],
            [-1.0, 1.0, -1.0, 1.0],
            [-1.0, -1.0, 1.0, 1.0],
            [1.0, 1.0, 1.0, 1.0],
        ]
    )


def to_lorentz(S: np.ndarray) -> np.ndarray:
    """Conjugate a Q_D-side matrix to the diag(1,1,1,-1) side."""
    q = q_conjugator()
    return q @ np.asarray(S, dtype=float) @ q


# ----------------------------------------------------------------------
# Boundary plane chart z = (n2 - i n3) / (1 - n1) on C = boundary of H^3.

def sphere_to_plane(n) -> complex:
    """Boundary chart sending the pole e1 to infinity and -e1 to 0."""
    n = np.asarray(n, dtype=float)
    denom = 1.0 - float(n[0])
    if denom < 1e-15:
        return complex(math.inf, 0.0)
    return complex(float(n[1]), -float(n[2])) / denom


def plane_to_sphere(z: complex) -> np.ndarray:
    x, y = z.real, z.imag
    zz = x * x + y * y
    return np.array([zz - 1.0, 2.0 * x, -2.0 * y]) / (zz + 1.0)


def boundary_action(L: np.ndarray, n) -> np.ndarray:
    """Projective action of a Lorentz matrix on boundary directions."""
    n = np.asarray(n, dtype=float)
    w = L @ np.array([n[0], n[1], n[2], 1.0])
    return w[:3] / w[3]


def moebius_from_lorentz(L: np.ndarray) -> MoebiusElement:
    """Inverse of iota (up to sign), via the action on 0, 1, infinity.

    The Moebius map z -> (az+b)/(cz+d) is reconstructed from the images of
    the three reference boundary points in the plane chart.
    """
    w0 = sphere_to_plane(boundary_action(L, plane_to_sphere(0.0)))
    w1 = sphere_to_plane(boundary_action(L, plane_to_sphere(1.0)))
    winf = sphere_to_plane(boundary_action(L, np.array([1.0, 0.0, 0.0])))
    if any(not math.isfinite(abs(w)) for w in (w0, w1, winf)):
        # Move the poles off infinity by precomposing with a rotation.
        R = rot_equator(0.5)
        m = moebius_from_lorentz(L @ R) @ moebius_equator_rotation(0.5).inv()
        return _unimodular(m)
    # Unique Moebius map with 0 -> w0, 1 -> w1, inf -> winf.
    a = winf * (w1 - w0)
    b = w0 * (winf - w1)
    c = w1 - w0
    d = winf - w1
    return _unimodular(MoebiusElement(a, b, c, d))


def _unimodular(m: MoebiusElement) -> MoebiusElement:
    s = cmath.sqrt(m.det())
    return MoebiusElement(m.a / s, m.b / s, m.c / s, m.d / s)
