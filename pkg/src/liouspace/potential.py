"""Potentials and the scalar superpotential / superoperator functions.

The classical Liouville equation, written on the doubled coordinates
(Q, q), differs from the von Neumann equation by the antisymmetric
superoperator

    E(Q, q) = (Q - q) V'((Q + q)/2) - V(Q) + V(q),

which vanishes identically exactly when V is at most quadratic.  This
module evaluates the two superpotential variants

    V_QM(Q, q) = V(Q) - V(q)          (commutator / von Neumann)
    V_CL(Q, q) = (Q - q) V'((Q+q)/2)  (Liouville)

for polynomial potentials, the Coulomb closed form in three dimensions,
the bipartite quartic superpotential, and a symbolic classification of
its monomials into bra/ket/intra/inter classes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import comb

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import SingularRegion


class SuperPotentialKind(enum.Enum):
    """Selects the commutator-type (QM) or Liouville-type (CL) superpotential."""

    QM = "qm"
    CL = "cl"


class MonomialClass(enum.Enum):
    """Classification of bipartite superpotential monomials.

    PURE_BRA / PURE_KET terms act on one side of the density matrix only
    and are exactly those a commutator can produce; INTER_SPACE_CROSS
    terms couple a bra variable of one subsystem to a ket variable of the
    other, i.e. the Hilbert space to its dual.
    """

    PURE_BRA = "pure_bra"
    PURE_KET = "pure_ket"
    INTRA_SUBSYSTEM_MIXED = "intra_subsystem_mixed"
    INTER_SPACE_CROSS = "inter_space_cross"


@dataclass(frozen=True)
class PolynomialPotential:
    """V(x) = sum_k coefficients[k] * x^k, natural units.

    Trailing zero coefficients are stripped so ``degree`` is well defined
    (degree 0 for V == 0).
    """

    coefficients: tuple[float, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(float(c) for c in self.coefficients)
        while len(coeffs) > 1 and coeffs[-1] == 0.0:
            coeffs = coeffs[:-1]
        if not coeffs:
            coeffs = (0.0,)
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def value(self, x):
        """Evaluate V(x) (Horner scheme, broadcasts over arrays)."""
        return npoly.polyval(np.asarray(x, dtype=float), self.coefficients)

    def derivative(self) -> "PolynomialPotential":
        if self.degree == 0:
            return PolynomialPotential((0.0,))
        return PolynomialPotential(tuple(npoly.polyder(self.coefficients)))

    def derivative_value(self, x):
        return self.derivative().value(x)

    @classmethod
    def free(cls) -> "PolynomialPotential":
        return cls((0.0,))

    @classmethod
    def harmonic(cls, k: float) -> "PolynomialPotential":
        """V(x) = (k/2) x^2."""
        return cls((0.0, 0.0, 0.5 * k))

    @classmethod
    def quartic(cls, lam: float) -> "PolynomialPotential":
        """V(x) = lam x^4."""
        return cls((0.0, 0.0, 0.0, 0.0, lam))


@dataclass(frozen=True)
class CoulombPotential:
    """V(chi) = -e2 / |chi| in three dimensions (Gaussian units, hbar = 1)."""

    e2: float

    def __post_init__(self) -> None:
        if self.e2 <= 0:
            raise ValueError("charge squared e2 must be positive")

    def value(self, chi) -> np.ndarray:
        r = np.linalg.norm(np.asarray(chi, dtype=float), axis=-1)
        return -self.e2 / r

    def gradient(self, chi) -> np.ndarray:
        chi = np.asarray(chi, dtype=float)
        r = np.linalg.norm(chi, axis=-1, keepdims=True)
        return self.e2 * chi / r**3


def super_potential(v: PolynomialPotential, kind: SuperPotentialKind, q_bra, q_ket):
    """Superpotential V_kind(Q, q); broadcasts over array arguments.

    QM: V(Q) - V(q).  CL: (Q - q) V'((Q + q)/2).
    """
    q_bra = np.asarray(q_bra, dtype=float)
    q_ket = np.asarray(q_ket, dtype=float)
    if kind is SuperPotentialKind.QM:
        return v.value(q_bra) - v.value(q_ket)
    return (q_bra - q_ket) * v.derivative_value(0.5 * (q_bra + q_ket))


def e_superoperator(v: PolynomialPotential, q_bra, q_ket):
    """E(Q, q) = V_CL(Q, q) - V_QM(Q, q); antisymmetric under Q <-> q."""
    return super_potential(v, SuperPotentialKind.CL, q_bra, q_ket) - super_potential(
        v, SuperPotentialKind.QM, q_bra, q_ket
    )


def e_vanishes_identically(v: PolynomialPotential) -> bool:
    """True iff E == 0 for all (Q, q), i.e. V is constant, linear or harmonic."""
    return v.degree <= 2


def coulomb_e_superoperator(pot: CoulombPotential, q_bra, q_ket, eps_reg: float = 1e-6):
    """Coulomb superoperator E(Q, q) = 4 e2 (Q^2 - q^2)/|Q + q|^3 - V(Q) + V(q).

    Q and q are 3-vectors (or arrays of them).  Raises SingularRegion if
    any of |Q|, |q|, |Q + q| falls at or below ``eps_reg``.
    """
    q_bra = np.asarray(q_bra, dtype=float)
    q_ket = np.asarray(q_ket, dtype=float)
    r_bra = np.linalg.norm(q_bra, axis=-1)
    r_ket = np.linalg.norm(q_ket, axis=-1)
    r_sum = np.linalg.norm(q_bra + q_ket, axis=-1)
    if np.any(r_bra <= eps_reg) or np.any(r_ket <= eps_reg) or np.any(r_sum <= eps_reg):
        raise SingularRegion(
            f"evaluation inside the excluded shell (eps_reg={eps_reg:g})"
        )
    e2 = pot.e2
    return 4.0 * e2 * (r_bra**2 - r_ket**2) / r_sum**3 + e2 / r_bra - e2 / r_ket


def bipartite_super_potential(lam: float, q1_bra, q1_ket, q2_bra, q2_ket):
    """Quartic two-particle superpotential.

    (lam/2) * (Q1 - q1 - (Q2 - q2)) * (Q1 + q1 - (Q2 + q2))**3,
    the Liouville-type superpotential of V(x1 - x2) = lam (x1 - x2)^4.
    """
    a = np.asarray(q1_bra, dtype=float) - np.asarray(q2_bra, dtype=float)
    b = np.asarray(q1_ket, dtype=float) - np.asarray(q2_ket, dtype=float)
    return 0.5 * lam * (a - b) * (a + b) ** 3


@dataclass(frozen=True)
class BipartiteMonomial:
    """coefficient * Q1^e[0] * q1^e[1] * Q2^e[2] * q2^e[3]."""

    exponents: tuple[int, int, int, int]
    coefficient: float

    def evaluate(self, q1_bra, q1_ket, q2_bra, q2_ket):
        i, j, k, l = self.exponents
        return (
            self.coefficient
            * np.asarray(q1_bra, dtype=float) ** i
            * np.asarray(q1_ket, dtype=float) ** j
            * np.asarray(q2_bra, dtype=float) ** k
            * np.asarray(q2_ket, dtype=float) ** l
        )


def classify_monomial(exponents: tuple[int, int, int, int]) -> MonomialClass:
    """Classify a monomial in (Q1, q1, Q2, q2) by which spaces it touches.

    Precedence: a bra variable of one subsystem paired with a ket variable
    of the other makes the term INTER_SPACE_CROSS; otherwise bra+ket of a
    single subsystem is INTRA_SUBSYSTEM_MIXED; otherwise the term is pure.
    """
    i, j, k, l = exponents
    if (i > 0 and l > 0) or (j > 0 and k > 0):
        return MonomialClass.INTER_SPACE_CROSS
    if (i > 0 and j > 0) or (k > 0 and l > 0):
        return MonomialClass.INTRA_SUBSYSTEM_MIXED
    if j == 0 and l == 0:
        return MonomialClass.PURE_BRA
    return MonomialClass.PURE_KET


def _poly_mul(p1: dict, p2: dict) -> dict:
    out: dict = {}
    for e1, c1 in p1.items():
        for e2, c2 in p2.items():
            key = tuple(a + b for a, b in zip(e1, e2))
            out[key] = out.get(key, 0.0) + c1 * c2
    return out


def classify_bipartite_terms(lam: float) -> list[tuple[BipartiteMonomial, MonomialClass]]:
    """Expand the bipartite superpotential into classified monomials.

    The returned monomials re-sum exactly to ``bipartite_super_potential``.
    """
    # variables ordered (Q1, q1, Q2, q2)
    a = {(1, 0, 0, 0): 1.0, (0, 0, 1, 0): -1.0}  # Q1 - Q2
    b = {(0, 1, 0, 0): 1.0, (0, 0, 0, 1): -1.0}  # q1 - q2
    amb = {e: a.get(e, 0.0) - b.get(e, 0.0) for e in set(a) | set(b)}
    apb = {e: a.get(e, 0.0) + b.get(e, 0.0) for e in set(a) | set(b)}
    poly = _poly_mul(amb, _poly_mul(apb, _poly_mul(apb, apb)))
    terms = []
    for exps in sorted(poly):
        coeff = 0.5 * lam * poly[exps]
        if coeff == 0.0:
            continue
        mono = BipartiteMonomial(exps, coeff)
        terms.append((mono, classify_monomial(exps)))
    return terms


def super_potential_monomials(
    v: PolynomialPotential, kind: SuperPotentialKind
) -> dict[tuple[int, int], float]:
    """Expand the superpotential into monomials {(i, j): c} of Q^i q^j.

    QM: V(Q) - V(q).  CL: (Q - q) V'((Q + q)/2), expanded binomially.
    The expansions re-sum exactly to ``super_potential``.
    """
    out: dict[tuple[int, int], float] = {}

    def add(key: tuple[int, int], c: float) -> None:
        out[key] = out.get(key, 0.0) + c

    if kind is SuperPotentialKind.QM:
        for k, c in enumerate(v.coefficients):
            if c == 0.0:
                continue
            add((k, 0), c)
            add((0, k), -c)
    else:
        dcoef = v.derivative().coefficients
        for j, d in enumerate(dcoef):
            if d == 0.0:
                continue
            for r in range(j + 1):
                c = d * comb(j, r) / 2.0**j
                add((r + 1, j - r), c)
                add((r, j - r + 1), -c)
    return {k: c for k, c in out.items() if c != 0.0}


def max_abs_e_on_grid(v: PolynomialPotential, span: float = 2.0, n: int = 64) -> float:
    """max |E(Q, q)| over a uniform n x n grid on [-span, span]^2."""
    pts = np.linspace(-span, span, n)
    qq, qk = np.meshgrid(pts, pts, indexing="ij")
    return float(np.max(np.abs(e_superoperator(v, qq, qk))))
