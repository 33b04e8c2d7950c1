"""Line model of the complementary series of PSL(2,C).

Functions are finite sums of e^{i j alpha} r^p (1 + r^2)^(-s-lam) with
integer j, lam, p and float coefficients, a family closed under the whole
Lie-algebra action; identities are therefore checked coefficient-wise by
exact symbolic differentiation, never numerically.

The operator phases are fixed so that the ladder normalizations

    R v_lj = 2 sqrt((l-j)(l+j+1)) v_{l,j+1}
    L v_lj = 2 sqrt((l+j)(l-j+1)) v_{l,j-1}

hold with positive constants on the real-radial basis v_lj.  Relative to
the raw combinations ie+if +- I(e-f) this multiplies the ladder operators
by a phase i (equivalently, redistributes i^(l-j) phases over the basis);
all six polar forms below are mutually consistent and are verified against
the primitive e, f, ie, if flows in the test suite.  The Casimir elements
are assembled from the primitives and are phase-convention independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

Term = tuple[int, int, int]  # (j, lam, power)


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach its internal tolerance."""


@dataclass
class LineFunction:
    """Finite combination sum_k coeff_k e^{i j alpha} r^p (1+r^2)^{-s-lam}."""

    s: float
    coeffs: dict[Term, complex] = field(default_factory=dict)

    def add_term(self, j: int, lam: int, p: int, coeff: complex) -> None:
        key = (j, lam, p)
        self.coeffs[key] = self.coeffs.get(key, 0.0) + coeff

    def __add__(self, other: "LineFunction") -> "LineFunction":
        out = LineFunction(self.s, dict(self.coeffs))
        for k, v in other.coeffs.items():
            out.add_term(*k, v)
        return out

    def scale(self, z: complex) -> "LineFunction":
        return LineFunction(self.s, {k: z * v for k, v in self.coeffs.items()})

    def __sub__(self, other: "LineFunction") -> "LineFunction":
        return self + other.scale(-1.0)

    def canonical(self) -> dict[int, tuple[int, dict[int, complex]]]:
        """Per angular weight j: (lam*, {power: coeff}) at the common lam*.

        Lifting (lam, P) to (lam+1, (1+r^2) P) is the identity on values,
        so every j-component is expanded at its maximal lam.
        """
        by_j: dict[int, list[Term]] = {}
        for (j, lam, p), v in self.coeffs.items():
            by_j.setdefault(j, []).append((lam, p, v))
        out = {}
        for j, items in by_j.items():
            lam_max = max(l for l, _, _ in items)
            poly: dict[int, complex] = {}
            for lam, p, v in items:
                # multiply by (1+r^2)^(lam_max - lam)
                d = lam_max - lam
                for i in range(d + 1):
                    key = p + 2 * i
                    poly[key] = poly.get(key, 0.0) + v * math.comb(d, i)
            out[j] = (lam_max, poly)
        return out

    def max_abs(self) -> float:
        c = self.canonical()
        vals = [abs(v) for _, poly in c.values() for v in poly.values()]
        return max(vals, default=0.0)

    def residual_vs(self, other: "LineFunction", scale: float = 0.0) -> float:
        """Max canonical coefficient of (self - other), relative."""
        diff = (self - other).max_abs()
        scale = max(self.max_abs(), other.max_abs(), scale, 1e-300)
        return diff / scale

    def evaluate(self, r, alpha):
        r = np.asarray(r, dtype=float)
        out = np.zeros(np.broadcast(r, np.asarray(alpha)).shape, dtype=complex)
        for (j, lam, p), v in self.coeffs.items():
            out = out + v * np.exp(1j * j * np.asarray(alpha)) * r**p * (
                1.0 + r * r
            ) ** (-self.s - lam)
        return out


# ----------------------------------------------------------------------
# Primitive flows pi(X) for X in {h, ih, e, ie, f, if}, derived from
# pi(g) f(z) = |bz+d|^{-2s} f((az+c)/(bz+d)).

def _mono(op, s, j, lam, p):
    """Action of a primitive on one monomial; returns [(term, coeff)]."""
    if op == "h":  # 2s + 2 r d_r
        return [((j, lam, p), 2 * s + 2 * p), ((j, lam + 1, p + 2), -4 * (s + lam))]
    if op == "ih":  # 2 d_alpha
        return [((j, lam, p), complex(0.0, 2.0 * j))]
    if op == "e":
        # -2 s r cos(a) - r^2 cos(a) d_r - r sin(a) d_alpha
        out = []
        for dj in (1, -1):
            out.append(((j + dj, lam, p + 1), -s))
            out.append(((j + dj, lam, p + 1), -0.5 * p))
            out.append(((j + dj, lam + 1, p + 3), s + lam))
        out.append(((j + 1, lam, p + 1), -0.5 * j))
        out.append(((j - 1, lam, p + 1), 0.5 * j))
        return out
    if op == "ie":
        # 2 s r sin(a) + r^2 sin(a) d_r - r cos(a) d_alpha
        out = []
        for dj, half in ((1, -0.5j), (-1, 0.5j)):
            out.append(((j + dj, lam, p + 1), 2 * s * half))
            out.append(((j + dj, lam, p + 1), half * p))
            out.append(((j + dj, lam + 1, p + 3), -half * 2 * (s + lam)))
        out.append(((j + 1, lam, p + 1), -0.5j * j))
        out.append(((j - 1, lam, p + 1), -0.5j * j))
        return out
    if op == "f":
        # cos(a) d_r - sin(a)/r d_alpha
        out = []
        for dj in (1, -1):
            out.append(((j + dj, lam, p - 1), 0.5 * p))
            out.append(((j + dj, lam + 1, p + 1), -(s + lam)))
        out.append(((j + 1, lam, p - 1), -0.5 * j))
        out.append(((j - 1, lam, p - 1), 0.5 * j))
        return out
    if op == "if":
        # sin(a) d_r + cos(a)/r d_alpha
        out = []
        for dj, half in ((1, -0.5j), (-1, 0.5j)):
            out.append(((j + dj, lam, p - 1), half * p))
            out.append(((j + dj, lam + 1, p + 1), -half * 2 * (s + lam)))
        out.append(((j + 1, lam, p - 1), 0.5j * j))
        out.append(((j - 1, lam, p - 1), 0.5j * j))
        return out
    raise ValueError(f"unknown primitive {op}")


def _apply_primitive(op: str, f: LineFunction) -> LineFunction:
    out = LineFunction(f.s)
    for (j, lam, p), v in f.coeffs.items():
        for term, c in _mono(op, f.s, j, lam, p):
            if c != 0:
                out.add_term(*term, v * c)
    return out


# Polar forms of the six documented operators, acting on e^{ij alpha} F(r):
#   R  -> e^{+i a} ( 2 s r + (r^2+1) d_r + j (r - 1/r) )
#   L  -> e^{-i a} (-2 s r - (r^2+1) d_r + j (r - 1/r) )
#   J+ -> -e^{+i a} ( d_r + (i/r) d_alpha )
#   J- -> +e^{-i a} ( d_r - (i/r) d_alpha )
# In terms of the primitives: R = I(ie+if) - (e-f), L = I(ie+if) + (e-f),
# J+ = -(f + I if), J- = +(f - I if); then R* = L and (J+)* = -J-, which is
# what makes all the displayed ladder constants positive simultaneously.

def _apply_named(op: str, f: LineFunction) -> LineFunction:
    s = f.s
    out = LineFunction(s)
    for (j, lam, p), v in f.coeffs.items():
        if op == "R":
            out.add_term(j + 1, lam - 1, p - 1, v * p)
            out.add_term(j + 1, lam, p + 1, v * (j - 2 * lam))
            out.add_term(j + 1, lam, p - 1, -v * j)
        elif op == "L":
            out.add_term(j - 1, lam - 1, p - 1, -v * p)
            out.add_term(j - 1, lam, p + 1, v * (j + 2 * lam))
            out.add_term(j - 1, lam, p - 1, -v * j)
        elif op == "J+":
            out.add_term(j + 1, lam, p - 1, v * (j - p))
            out.add_term(j + 1, lam + 1, p + 1, v * 2 * (s + lam))
        elif op == "J-":
            out.add_term(j - 1, lam, p - 1, v * (j + p))
            out.add_term(j - 1, lam + 1, p + 1, -v * 2 * (s + lam))
        else:
            raise ValueError(f"unknown operator {op}")
    return out


OPERATORS = ("h", "ih", "R", "L", "J+", "J-")


def apply_operator(op: str, f: LineFunction) -> LineFunction:
    """Apply one of h, ih, R, L, J+, J- by exact symbolic differentiation."""
    if op in ("h", "ih"):
        return _apply_primitive(op, f)
    if op in ("R", "L", "J+", "J-"):
        return _apply_named(op, f)
    raise ValueError(f"unknown operator {op}; expected one of {OPERATORS}")


def apply_primitive(op: str, f: LineFunction) -> LineFunction:
    """Apply one of the raw flows h, ih, e, ie, f, if."""
    return _apply_primitive(op, f)


def casimir(f: LineFunction) -> LineFunction:
    """Omega = h^2 - ih^2 + 2(ef + fe - ie if - if ie), from primitives."""
    P = _apply_primitive

    def sq(op):
        return P(op, P(op, f))

    out = sq("h") - sq("ih")
    out = out + (P("e", P("f", f)) + P("f", P("e", f))).scale(2.0)
    out = out - (P("ie", P("if", f)) + P("if", P("ie", f))).scale(2.0)
    return out


def casimir_k(f: LineFunction) -> LineFunction:
    """Omega_K = ((ih)^2 + (ie+if)^2 + (e-f)^2) / 4."""
    P = _apply_primitive
    a = P("ih", P("ih", f))
    g1 = P("ie", f) + P("if", f)
    b = P("ie", g1) + P("if", g1)
    g2 = P("e", f) - P("f", f)
    c = P("e", g2) - P("f", g2)
    return (a + b + c).scale(0.25)


# ----------------------------------------------------------------------
# K-type eigenvectors.

def _loggamma_abs(x: float) -> float:
    return math.lgamma(x) if x > 0 else _loggamma_neg(x)


def _loggamma_neg(x: float) -> float:
    # log|Gamma(x)| for non-integer x < 0 via the reflection formula.
    return (
        math.log(math.pi)
        - math.log(abs(math.sin(math.pi * x)))
        - math.lgamma(1.0 - x)
    )


def make_vlj(s: float, l: int, j: int) -> LineFunction:
    """The normalized K-type eigenfunction v_lj, exact radial polynomial.

    v_lj = N e^{ij alpha} (1+r^2)^{-s-l} sum_k (-1)^k C(l, l-|j|-k) C(l, k)
    r^{2(l-k)-|j|}; for j < 0 the radial part is that of |j| mirrored in
    alpha with an extra phase (-1)^j, the unique choice under which the
    ladder identities keep positive constants on both sides of j = 0.
    N makes <v, v> = 1 under the intertwined inner product.
    """
    if not 1.0 < s < 2.0:
        raise ValueError(f"s = {s} outside the complementary range (1, 2)")
    if l < 0 or abs(j) > l:
        raise ValueError(f"invalid K-type index (l, j) = ({l}, {j})")
    ja = abs(j)
    logN = 0.5 * (
        math.lgamma(l + s)
        + _loggamma_abs(s - l - 1.0)
        + math.log(2 * l + 1)
        + math.lgamma(l - ja + 1)
        + math.lgamma(l + ja + 1)
    ) - (math.lgamma(l + 1) + math.log(math.pi) + math.lgamma(s - 1.0))
    N = math.exp(logN)
    if j < 0 and ja % 2:
        N = -N
    f = LineFunction(s)
    for k in range(l - ja + 1):
        coeff = N * (-1) ** k * math.comb(l, l - ja - k) * math.comb(l, k)
        f.add_term(j, l, 2 * (l - k) - ja, coeff)
    return f


def intertwine_const(s: float, l: int) -> float:
    """(-1)^l pi Gamma(s-1)^2 / (Gamma(l+s) Gamma(s-l-1)); positive on (1,2)."""
    if not 1.0 < s < 2.0:
        raise ValueError(f"s = {s} outside (1, 2)")
    logv = (
        math.log(math.pi)
        + 2 * math.lgamma(s - 1.0)
        - math.lgamma(l + s)
        - _loggamma_abs(s - l - 1.0)
    )
    return math.exp(logv)


def pair_with_vlj(f: LineFunction, s: float, l: int, j: int) -> complex:
    """<f, v_lj> under the intertwined inner product, exactly.

    Uses I applied to the plain shape r^q e^{ij alpha}(1+r^2)^{-s-l}, which
    scales by intertwine_const(s, l) and flips s to 2-s; the resulting
    radial integrals are Beta functions.
    """
    target = make_vlj(s, l, j)
    kappa = intertwine_const(s, l)
    total = 0.0 + 0.0j
    comp = f.canonical().get(j)
    if comp is None:
        return 0.0 + 0.0j
    lam1, poly = comp
    for p1, v1 in poly.items():
        if abs(v1) == 0.0:
            continue
        for (j2, lam2, p2), v2 in target.coeffs.items():
            # conj(I . term2) has radial (1+r^2)^{-(2-s)-l}; lam2 == l.
            P = p1 + p2
            if P % 2:
                raise ValueError("parity mismatch in radial pairing")
            # (1+r^2)^{-s-lam1} (1+r^2)^{-(2-s)-lam2}: the s cancels and
            # int u^{P/2} (1+u)^{-(lam1+lam2+2)} du is a Beta function.
            a_arg = P / 2 + 1.0
            b_arg = lam1 + lam2 + 1.0 - P / 2
            if b_arg <= 0:
                raise ValueError("divergent radial pairing")
            beta = math.exp(
                math.lgamma(a_arg) + math.lgamma(b_arg) - math.lgamma(a_arg + b_arg)
            )
            total += v1 * np.conj(v2) * kappa * 2.0 * math.pi * 0.5 * beta
    return complex(total)


def norm_check(s: float, l: int, j: int) -> float:
    """|<v_lj, v_lj> - 1|, evaluated by the exact Beta-function route."""
    return abs(pair_with_vlj(make_vlj(s, l, j), s, l, j) - 1.0)


# ----------------------------------------------------------------------
# Ladder identity residuals.

def _coef_R(l: int, j: int) -> float:
    return 2.0 * math.sqrt((l - j) * (l + j + 1))


def _coef_L(l: int, j: int) -> float:
    return 2.0 * math.sqrt((l + j) * (l - j + 1))


def check_ladder(s: float, l: int, j: int) -> dict[str, float]:
    """Coefficient residuals of the R, L, h, J+, J- identities at (l, j).

    Every residual is relative to the largest coefficient appearing on
    either side; exact identities give 0.0 up to roundoff.
    """
    v = make_vlj(s, l, j)

    def combo(entries):
        out = LineFunction(s)
        for coef, (ll, jj) in entries:
            if coef != 0.0 and ll >= abs(jj) and ll >= 0:
                out = out + make_vlj(s, ll, jj).scale(coef)
        return out

    res = {}
    rhs = combo([(_coef_R(l, j), (l, j + 1))]) if j < l else LineFunction(s)
    res["R"] = apply_operator("R", v).residual_vs(rhs)
    rhs = combo([(_coef_L(l, j), (l, j - 1))]) if j > -l else LineFunction(s)
    res["L"] = apply_operator("L", v).residual_vs(rhs)

    c_down = math.sqrt(
        (l + 1 - s) * (l - 1 + s) * (l * l - j * j) / ((2 * l - 1) * (2 * l + 1))
    ) if l > 0 else 0.0
    c_up = math.sqrt(
        (l + 2 - s) * (l + s) * ((l + 1) ** 2 - j * j) / ((2 * l + 1) * (2 * l + 3))
    )
    rhs = combo([(2 * c_down, (l - 1, j)), (-2 * c_up, (l + 1, j))])
    res["h"] = apply_operator("h", v).residual_vs(rhs)

    cp_up = math.sqrt(
        (l + 2 + j) * (l + 1 + j) * (s + l) * (l + 2 - s)
        / ((2 * l + 1) * (2 * l + 3))
    )
    cp_mid = math.sqrt((l + j + 1) * (l - j)) if abs(j + 1) <= l else 0.0
    cp_down = (
        math.sqrt(
            (l - j) * (l - j - 1) * (l - 1 + s) * (l + 1 - s)
            / ((2 * l - 1) * (2 * l + 1))
        )
        if l > 0
        else 0.0
    )
    rhs = combo(
        [(cp_up, (l + 1, j + 1)), (-cp_mid, (l, j + 1)), (cp_down, (l - 1, j + 1))]
    )
    res["J+"] = apply_operator("J+", v).residual_vs(rhs)

    cm_up = math.sqrt(
        (l + 2 - j) * (l + 1 - j) * (s + l) * (l + 2 - s)
        / ((2 * l + 1) * (2 * l + 3))
    )
    cm_mid = math.sqrt((l - j + 1) * (l + j)) if abs(j - 1) <= l else 0.0
    cm_down = (
        math.sqrt(
            (l + j) * (l + j - 1) * (l - 1 + s) * (l + 1 - s)
            / ((2 * l - 1) * (2 * l + 1))
        )
        if l > 0
        else 0.0
    )
    rhs = combo(
        [(cm_up, (l + 1, j - 1)), (-cm_mid, (l, j - 1)), (cm_down, (l - 1, j - 1))]
    )
    res["J-"] = apply_operator("J-", v).residual_vs(rhs)
    return res


def check_casimir(s: float, l: int, j: int) -> float:
    """Residual of Omega v + 4 s (2-s) v = 0."""
    v = make_vlj(s, l, j)
    return casimir(v).residual_vs(v.scale(-4.0 * s * (2.0 - s)), scale=v.max_abs())


def check_casimir_k(s: float, l: int, j: int) -> float:
    """Residual of Omega_K v + l (l+1) v = 0."""
    v = make_vlj(s, l, j)
    rhs = v.scale(-float(l * (l + 1)))
    return casimir_k(v).residual_vs(rhs, scale=v.max_abs())


# ----------------------------------------------------------------------
# Matrix coefficients.

def matrix_coefficient(s: float, a: int, a1: int, c: int, t: float) -> float:
    """<pi(a_t) v_{ac}, v_{a1 c}> with pi(a_t) f(z) = e^{st} f(e^t z).

    The angular integral is an exact Kronecker delta in c; the radial
    integral runs through adaptive quadrature in log r^2 (substitution
    u = e^x), with the intertwined weight carrying parameter 2 - s.
    """
    if abs(c) > min(a, a1):
        raise ValueError("need |c| <= min(a, a1)")
    va = make_vlj(s, a, c)
    vb = make_vlj(s, a1, c)
    kappa = intertwine_const(s, a1)
    pa = _radial_poly(va, c)
    pb = _radial_poly(vb, c)
    et = math.exp(t)

    def integrand(x):
        u = math.exp(x)
        r = math.sqrt(u)
        fa = sum(cm * (et * r) ** m for m, cm in pa.items())
        fb = sum(cn * r**n for n, cn in pb.items())
        return (
            fa
            * fb
            * (1.0 + et * et * u) ** (-s - a)
            * (1.0 + u) ** (s - 2.0 - a1)
            * u
        )

    val, err = integrate.quad(
        integrand, -60.0, 60.0, epsabs=1e-13, epsrel=1e-12, limit=400
    )
    if err > 1e-8 * max(1.0, abs(val)):
        raise QuadratureError(f"radial quadrature error estimate {err:g}")
    # i/2 dz dz~ = r dr dalpha; angular integral gives 2 pi; u = r^2.
    return float(math.exp(s * t) * kappa * 2.0 * math.pi * 0.5 * val)


def matrix_coefficient_closed00(s: float, t: float) -> float:
    """sinh((s-1)t) / ((s-1) sinh t), the a = a1 = c = 0 closed form."""
    if t == 0.0:
        return 1.0
    return math.sinh((s - 1.0) * t) / ((s - 1.0) * math.sinh(t))


def _radial_poly(v: LineFunction, j: int) -> dict[int, float]:
    poly: dict[int, float] = {}
    for (jj, lam, p), coeff in v.coeffs.items():
        assert jj == j
        poly[p] = poly.get(p, 0.0) + float(np.real(coeff))
    return poly
