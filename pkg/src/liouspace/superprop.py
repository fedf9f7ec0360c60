"""Free superpropagator and first-order perturbation theory.

The free superpropagator factorizes into forward and conjugated free
Feynman propagators,

    G0(Qf, qf; T | Qi, qi) = G0(Qf, Qi; T) * conj(G0(qf, qi; T)),

identical for classical and quantum propagation.  For the quartic
potential the first-order correction is

    G = G0 * (1 - (i/hbar) lam [C1 Gamma_QM + C2 Gamma_CL]) + O(lam^2),

with (C1, C2) = (1, 0) for quantum and (1/2, 1/2) for classical
dynamics.  ``dyson_first_order_numeric`` evaluates the defining triple
integral independently: the oscillatory-Gaussian x and y integrals are
reduced exactly to complex Gaussian moments, leaving one smooth time
integral for adaptive quadrature.  ``dyson_iterate`` realizes the Dyson
integral equation order by order on a small grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.integrate import quad

from .errors import DimensionTooLarge, NonpositiveTime, QuadratureNotConverged
from .potential import (
    PolynomialPotential,
    SuperPotentialKind,
    super_potential,
    super_potential_monomials,
)
from .superspace import SuperDensity, SuperGrid


@dataclass(frozen=True)
class PropagatorPoint:
    """Endpoints and duration for a superpropagator evaluation."""

    q_bra_f: float
    q_ket_f: float
    q_bra_i: float
    q_ket_i: float
    duration: float
    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self) -> None:
        if self.mass <= 0 or self.hbar <= 0:
            raise ValueError("mass and hbar must be positive")


@dataclass(frozen=True)
class FirstOrderCoefficients:
    c1: float
    c2: float


def first_order_coefficients(kind: SuperPotentialKind) -> FirstOrderCoefficients:
    if kind is SuperPotentialKind.QM:
        return FirstOrderCoefficients(1.0, 0.0)
    return FirstOrderCoefficients(0.5, 0.5)


def free_propagator(x, y, duration: float, mass: float = 1.0, hbar: float = 1.0):
    """G0(x, y; T) = (m / 2 pi i hbar T)^(1/2) exp(i m (x-y)^2 / 2 hbar T).

    Principal branch: (1/i)^(1/2) = exp(-i pi/4).
    """
    if duration <= 0:
        raise NonpositiveTime("free propagator needs T > 0")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    amp = np.sqrt(mass / (2.0 * np.pi * hbar * duration)) * np.exp(-0.25j * np.pi)
    return amp * np.exp(1j * mass * (x - y) ** 2 / (2.0 * hbar * duration))


def free_superpropagator(pt: PropagatorPoint) -> complex:
    """G0(bra endpoints) * conj(G0(ket endpoints)); kind-independent."""
    g_bra = free_propagator(pt.q_bra_f, pt.q_bra_i, pt.duration, pt.mass, pt.hbar)
    g_ket = free_propagator(pt.q_ket_f, pt.q_ket_i, pt.duration, pt.mass, pt.hbar)
    return complex(g_bra * np.conj(g_ket))


def _p4(a: float, b: float) -> float:
    return a**4 + a**3 * b + a**2 * b**2 + a * b**3 + b**4


def gamma_qm(pt: PropagatorPoint) -> complex:
    """Quartic first-order function with the commutator-type superpotential.

    (T/5)[ (i hbar T / 2m)(3Q^2 + 4QQ' + 3Q'^2) + Q^4 + Q^3 Q' + Q^2 Q'^2
    + Q Q'^3 + Q'^4 ] minus the same bracket at (q, q'), conjugated.
    """
    big_q, small_q = pt.q_bra_f, pt.q_ket_f
    big_qp, small_qp = pt.q_bra_i, pt.q_ket_i
    t, m, hb = pt.duration, pt.mass, pt.hbar

    def bracket(a: float, b: float) -> complex:
        return (t / 5.0) * (
            0.5 * (1j * hb * t / m) * (3 * a**2 + 4 * a * b + 3 * b**2) + _p4(a, b)
        )

    return complex(bracket(big_q, big_qp) - np.conj(bracket(small_q, small_qp)))


def gamma_cl(pt: PropagatorPoint) -> complex:
    """Additional quartic first-order terms specific to classical dynamics."""
    big_q, small_q = pt.q_bra_f, pt.q_ket_f
    big_qp, small_qp = pt.q_bra_i, pt.q_ket_i
    t, m, hb = pt.duration, pt.mass, pt.hbar
    sym = (
        3 * big_q * small_q
        + 2 * big_q * small_qp
        + 2 * big_qp * small_q
        + 3 * big_qp * small_qp
    )

    def bracket(a: float, ap: float, b: float, bp: float) -> float:
        return (
            a**3 * (4 * b + bp)
            + a**2 * ap * (3 * b + 2 * bp)
            + a * ap**2 * (2 * b + 3 * bp)
            + ap**3 * (b + 4 * bp)
        )

    return complex(
        (t / 5.0)
        * (
            (1j * hb * t / m) * sym
            + 0.5 * bracket(big_q, big_qp, small_q, small_qp)
            - 0.5 * bracket(small_q, small_qp, big_q, big_qp)
        )
    )


def first_order_superpropagator(
    pt: PropagatorPoint, lam: float, kind: SuperPotentialKind
) -> complex:
    """G0 * (1 - (i/hbar) lam [C1 Gamma_QM + C2 Gamma_CL])."""
    coeff = first_order_coefficients(kind)
    combo = coeff.c1 * gamma_qm(pt) + coeff.c2 * gamma_cl(pt)
    return free_superpropagator(pt) * (1.0 - 1j * lam * combo / pt.hbar)


def free_moment_integral(
    a: float, b: float, t1: float, t2: float, k: int, mass: float, hbar: float
) -> complex:
    """int dx G0(a,x;t1) x^k G0(x,b;t2), divided by G0(a,b;t1+t2).

    Exact complex-Gaussian moment reduction: the pinched quadratic phase
    has stationary point xbar = (a t2 + b t1)/(t1+t2) and inverse width
    i/(2 beta) = i hbar t1 t2 / (m (t1+t2)).
    """
    total = t1 + t2
    xbar = (a * t2 + b * t1) / total
    half_inv = 1j * hbar * t1 * t2 / (mass * total)  # i / (2 beta)
    out = 0.0 + 0.0j
    for j in range(0, k + 1, 2):
        double_fact = 1
        for v in range(j - 1, 0, -2):
            double_fact *= v
        out += comb(k, j) * xbar ** (k - j) * double_fact * half_inv ** (j // 2)
    return out


def dyson_first_order_numeric(
    pt: PropagatorPoint,
    lam: float,
    kind: SuperPotentialKind,
    rel_tol: float = 1e-8,
) -> complex:
    """First-order Dyson correction -(i/hbar) int dtau dx dy G0 V G0.

    Serves as the independent oracle for the Gamma closed forms: the
    superpotential is expanded into monomials x^i y^j by the potential
    module, each (x, y) integral is reduced to Gaussian moments, and the
    remaining smooth tau integral is evaluated by adaptive quadrature.
    Returns the correction term alone (zero for lam = 0).
    """
    if pt.duration <= 0:
        raise NonpositiveTime("T must be positive")
    monomials = super_potential_monomials(PolynomialPotential.quartic(lam), kind)
    t_tot, m, hb = pt.duration, pt.mass, pt.hbar

    def reduced(tau: float) -> complex:
        acc = 0.0 + 0.0j
        for (i, j), c in monomials.items():
            mx = free_moment_integral(pt.q_bra_f, pt.q_bra_i, t_tot - tau, tau, i, m, hb)
            my = free_moment_integral(pt.q_ket_f, pt.q_ket_i, t_tot - tau, tau, j, m, hb)
            acc += c * mx * np.conj(my)
        return acc

    re, re_err = quad(lambda t: reduced(t).real, 0.0, t_tot, epsabs=0.0, epsrel=rel_tol)
    im, im_err = quad(lambda t: reduced(t).imag, 0.0, t_tot, epsabs=0.0, epsrel=rel_tol)
    integral = re + 1j * im
    err = np.hypot(re_err, im_err)
    if err > 100.0 * rel_tol * max(abs(integral), 1e-300) and err > 1e-12:
        raise QuadratureNotConverged(
            f"tau quadrature error estimate {err:.3e} for integral {integral:.3e}"
        )
    return complex(-1j / hb * free_superpropagator(pt) * integral)


def free_superpropagator_matrix(
    grid: SuperGrid, duration: float, mass: float = 1.0, hbar: float = 1.0
) -> np.ndarray:
    """Pointwise G0(x_a, x_c; T) on the grid; applying it from the left and
    its conjugate from the right (with measure dq^2) propagates rho(Q, q)."""
    pts = grid.points
    return free_propagator(pts[:, None], pts[None, :], duration, mass, hbar)


def apply_free_superpropagator(
    sd: SuperDensity, duration: float, mass: float = 1.0, hbar: float = 1.0
) -> SuperDensity:
    """rho(T) = dq^2 * G rho(0) G^dagger with the pointwise free kernel."""
    g = free_superpropagator_matrix(sd.grid, duration, mass, hbar)
    out = sd.grid.dq**2 * (g @ sd.values @ g.conj().T)
    return SuperDensity(sd.grid, out)


MAX_KERNEL_GRID = 32


def band_limited_free_matrix(
    grid: SuperGrid, duration: float, mass: float = 1.0, hbar: float = 1.0
) -> np.ndarray:
    """Grid-exact single-axis free propagator exp(-i p^2 T / 2 m hbar).

    This is the unitary the split-step kinetic substep exponentiates; for
    durations the grid resolves, its entries approach dq * G0 pointwise.
    """
    n = grid.n
    k2 = (2.0 * np.pi * np.fft.fftfreq(n, grid.dq)) ** 2
    phases = np.exp(-1j * hbar * k2 * duration / (2.0 * mass))
    return np.fft.ifft(phases[:, None] * np.fft.fft(np.eye(n), axis=0), axis=0)


def dyson_iterate(
    grid: SuperGrid,
    v: PolynomialPotential,
    kind: SuperPotentialKind,
    n_orders: int,
    duration: float,
    n_tau: int = 24,
    mass: float = 1.0,
    hbar: float = 1.0,
) -> np.ndarray:
    """Fixed-order truncation of the Dyson equation as a 4-index grid kernel.

    Returns K[a, b, c, d] ~ G(Q_a, q_b; T | Q_c, q_d; 0) with the
    convention rho(T) = dq^2 * sum_{c,d} K[a,b,c,d] rho0[c,d].  The free
    kernels are the band-limited grid unitaries (pointwise sampling of the
    oscillatory continuum kernel does not converge on desk grids; the
    kernel is meaningful through its action on band-limited states).  The
    time integral uses midpoint nodes; intermediate kernels are built
    recursively order by order.
    """
    if grid.n > MAX_KERNEL_GRID:
        raise DimensionTooLarge(f"kernel grid limited to n <= {MAX_KERNEL_GRID}")
    if duration <= 0:
        raise NonpositiveTime("T must be positive")
    if n_orders < 0:
        raise ValueError("n_orders must be >= 0")
    n = grid.n
    pts = grid.points
    v_super = np.asarray(
        super_potential(v, kind, pts[:, None], pts[None, :]), dtype=float
    )
    d_tau = duration / n_tau
    taus = (np.arange(n_tau) + 0.5) * d_tau

    def free_op(t: float) -> np.ndarray:
        u = band_limited_free_matrix(grid, t, mass, hbar)
        return np.einsum("ac,bd->abcd", u, u.conj())

    def propagate(t: float, kern: np.ndarray) -> np.ndarray:
        """K0(t) o (V * kern) in operator units (no measure factors)."""
        u = band_limited_free_matrix(grid, t, mass, hbar)
        w = v_super[:, :, None, None] * kern
        half = np.tensordot(u, w, axes=([1], [0]))  # (a, y, c, d)
        out = np.tensordot(u.conj(), half, axes=([1], [1]))  # (b, a, c, d)
        return out.transpose(1, 0, 2, 3)

    total = free_op(duration)
    if n_orders > 0:
        factor = -1j * d_tau / hbar
        prev = [free_op(t) for t in taus]  # order-0 operators at the nodes
        for order in range(n_orders):
            final = np.zeros((n, n, n, n), dtype=complex)
            for m_idx in range(n_tau):
                final += propagate(duration - taus[m_idx], prev[m_idx])
            total = total + factor * final
            if order == n_orders - 1:
                break
            # order k at the nodes from order k-1 at strictly earlier nodes
            current = []
            for l_idx in range(n_tau):
                acc = np.zeros((n, n, n, n), dtype=complex)
                for m_idx in range(l_idx):
                    acc += propagate(taus[l_idx] - taus[m_idx], prev[m_idx])
                current.append(factor * acc)
            prev = current
    return total / grid.dq**2


def apply_kernel(kernel: np.ndarray, sd: SuperDensity) -> SuperDensity:
    out = sd.grid.dq**2 * np.einsum("abcd,cd->ab", kernel, sd.values)
    return SuperDensity(sd.grid, out)
