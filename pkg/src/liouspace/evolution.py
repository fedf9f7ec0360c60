"""Time evolution of density matrices.

Covers the exact exponential exp(-i L t / hbar) for dense superoperators,
a midpoint time-ordered product for time-dependent generators, the
interaction picture (with optional truncation at first perturbative
order), split-step Trotter evolution on (Q, q) grids, and the classical
method-of-characteristics ensemble, which serves as the independent
oracle for the grid dynamics.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
import scipy.linalg

from .errors import EnergyDriftExceeded
from .liouvillian import BasisLiouvillian, GridLiouvillian, build_grid_liouvillian
from .potential import PolynomialPotential, SuperPotentialKind
from .superspace import SuperDensity, SuperGrid

BOUNDARY_MASS_TOL = 1e-10


class EvolveMethod(enum.Enum):
    MATRIX_EXP = "matrix_exp"
    TROTTER_LIE = "trotter_lie"
    TROTTER_STRANG = "trotter_strang"
    RK4 = "rk4"


@dataclass(frozen=True)
class EvolutionConfig:
    t1: float
    t0: float = 0.0
    n_steps: int = 128
    method: EvolveMethod = EvolveMethod.TROTTER_STRANG
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self) -> None:
        if self.t1 <= self.t0:
            raise ValueError("t1 must exceed t0")
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")


def _dense_of(liouville) -> tuple[np.ndarray, float]:
    return liouville.dense(), liouville.hbar


def _is_hermitian_matrix(mat: np.ndarray) -> bool:
    scale = max(float(np.max(np.abs(mat))), 1e-300)
    return bool(np.max(np.abs(mat - mat.conj().T)) <= 1e-12 * scale)


def _expi(mat: np.ndarray, prefactor: complex) -> np.ndarray:
    """exp(prefactor * mat), via eigendecomposition for Hermitian mat."""
    if _is_hermitian_matrix(mat):
        w, u = np.linalg.eigh(mat)
        return (u * np.exp(prefactor * w)) @ u.conj().T
    return scipy.linalg.expm(prefactor * mat)


def evolve_exact(
    liouville: Union[BasisLiouvillian, GridLiouvillian],
    rho0: np.ndarray,
    t: float,
) -> np.ndarray:
    """rho(t) = exp(-i L t / hbar) rho(0) through the dense superoperator."""
    dense, hbar = _dense_of(liouville)
    u = _expi(dense, -1j * t / hbar)
    return (u @ np.asarray(rho0, dtype=complex).reshape(-1)).reshape(rho0.shape)


class ExactEvolver:
    """Reusable exact propagator for time series from one diagonalization."""

    def __init__(self, liouville) -> None:
        self._dense, self.hbar = _dense_of(liouville)
        self._hermitian = _is_hermitian_matrix(self._dense)
        if self._hermitian:
            self._w, self._u = np.linalg.eigh(self._dense)
        else:
            self._w = self._u = None

    def propagate(self, rho0: np.ndarray, t: float) -> np.ndarray:
        vec = np.asarray(rho0, dtype=complex).reshape(-1)
        if self._hermitian:
            phases = np.exp(-1j * self._w * t / self.hbar)
            out = self._u @ (phases * (self._u.conj().T @ vec))
        else:
            out = scipy.linalg.expm(-1j * self._dense * t / self.hbar) @ vec
        return out.reshape(rho0.shape)


def evolve_ordered(
    family: Callable[[float], np.ndarray],
    rho0: np.ndarray,
    config: EvolutionConfig,
) -> np.ndarray:
    """Time-ordered evolution by a midpoint-exponential product (order 2).

    ``family(t)`` returns the dense generator (energy units) at time t.
    With method RK4 the vectorized equation is integrated classically
    instead of exponentiated per substep.
    """
    shape = np.asarray(rho0).shape
    vec = np.asarray(rho0, dtype=complex).reshape(-1)
    dt = (config.t1 - config.t0) / config.n_steps
    if config.method is EvolveMethod.RK4:
        def rhs(t, v):
            return -1j * (family(t) @ v) / config.hbar

        t = config.t0
        for _ in range(config.n_steps):
            k1 = rhs(t, vec)
            k2 = rhs(t + dt / 2, vec + dt / 2 * k1)
            k3 = rhs(t + dt / 2, vec + dt / 2 * k2)
            k4 = rhs(t + dt, vec + dt * k3)
            vec = vec + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            t += dt
        return vec.reshape(shape)
    for j in range(config.n_steps):
        t_mid = config.t0 + (j + 0.5) * dt
        vec = _expi(family(t_mid), -1j * dt / config.hbar) @ vec
    return vec.reshape(shape)


def evolve_interaction_picture(
    liouville0,
    perturbation: Union[np.ndarray, Callable[[float], np.ndarray]],
    rho0: np.ndarray,
    config: EvolutionConfig,
    order: int | None = None,
) -> np.ndarray:
    """Evolution with L = L0 + L' in the Liouville-space interaction picture.

    L0 is exponentiated exactly; the rotated-frame generator
    L'_I(tau) = U0(tau)^-1 L'(tau) U0(tau) is integrated by the ordered
    product (order=None), or the time-ordered exponential is truncated at
    first order in L' (order=1), which is the starting point of
    perturbation theory.
    """
    dense0, hbar = _dense_of(liouville0)
    if hbar != config.hbar:
        raise ValueError("config.hbar must match the operator's hbar")
    pert = perturbation if callable(perturbation) else (lambda _t, _m=perturbation: _m)

    hermitian = _is_hermitian_matrix(dense0)
    if hermitian:
        w, u = np.linalg.eigh(dense0)
        uinv = u.conj().T

        def u0(tau: float) -> np.ndarray:
            return (u * np.exp(-1j * w * (tau - config.t0) / hbar)) @ uinv

        def u0_inv(tau: float) -> np.ndarray:
            return (u * np.exp(1j * w * (tau - config.t0) / hbar)) @ uinv

    else:
        def u0(tau: float) -> np.ndarray:
            return scipy.linalg.expm(-1j * dense0 * (tau - config.t0) / hbar)

        def u0_inv(tau: float) -> np.ndarray:
            return scipy.linalg.expm(1j * dense0 * (tau - config.t0) / hbar)

    def family_rotated(tau: float) -> np.ndarray:
        return u0_inv(tau) @ pert(tau) @ u0(tau)

    vec0 = np.asarray(rho0, dtype=complex).reshape(-1)
    if order is None:
        rho_i = evolve_ordered(family_rotated, rho0, config)
        vec_i = rho_i.reshape(-1)
    elif order == 1:
        dt = (config.t1 - config.t0) / config.n_steps
        first = np.zeros((vec0.size, vec0.size), dtype=complex)
        for j in range(config.n_steps):
            first += family_rotated(config.t0 + (j + 0.5) * dt)
        vec_i = vec0 - (1j * dt / hbar) * (first @ vec0)
    else:
        raise ValueError("order must be None or 1")
    return (u0(config.t1) @ vec_i).reshape(rho0.shape)


def boundary_mass(values: np.ndarray) -> float:
    """Largest |rho| on the outermost grid ring, relative to the peak."""
    peak = max(float(np.max(np.abs(values))), 1e-300)
    edge = max(
        float(np.max(np.abs(values[0, :]))),
        float(np.max(np.abs(values[-1, :]))),
        float(np.max(np.abs(values[:, 0]))),
        float(np.max(np.abs(values[:, -1]))),
    )
    return edge / peak


def evolve_trotter(
    v: PolynomialPotential,
    grid: SuperGrid,
    kind: SuperPotentialKind,
    rho0: SuperDensity,
    config: EvolutionConfig,
) -> SuperDensity:
    """Split-step evolution alternating exact kinetic and potential phases.

    Each substep composes one discretized factor of the superpropagator
    path integral: the kinetic factor is diagonal in the 2-d Fourier dual
    of (Q, q), the potential + E factor is diagonal in (Q, q).  Lie
    splitting is first order, Strang second order.
    """
    if config.method not in (EvolveMethod.TROTTER_LIE, EvolveMethod.TROTTER_STRANG):
        raise ValueError("config.method must be a Trotter variant")
    if boundary_mass(rho0.values) > BOUNDARY_MASS_TOL:
        warnings.warn(
            "initial density is not negligible at the grid boundary; "
            "periodic truncation artifacts are expected",
            stacklevel=2,
        )
    op = build_grid_liouvillian(v, grid, kind, mass=config.mass, hbar=config.hbar)
    dt = (config.t1 - config.t0) / config.n_steps
    k2 = (2.0 * np.pi * np.fft.fftfreq(grid.n, grid.dq)) ** 2
    kin_gen = (config.hbar / (2.0 * config.mass)) * (k2[:, None] - k2[None, :])
    kin_phase = np.exp(-1j * dt * kin_gen)
    pot_gen = (op.potential_diag + op.e_diag) / config.hbar
    rho = rho0.values.copy()
    if config.method is EvolveMethod.TROTTER_LIE:
        pot_phase = np.exp(-1j * dt * pot_gen)
        for _ in range(config.n_steps):
            rho = np.fft.ifft2(kin_phase * np.fft.fft2(pot_phase * rho))
    else:
        half = np.exp(-0.5j * dt * pot_gen)
        for _ in range(config.n_steps):
            rho = half * np.fft.ifft2(kin_phase * np.fft.fft2(half * rho))
    return SuperDensity(grid, rho)


@dataclass
class CharacteristicsEnsemble:
    """Weighted phase-space samples following Hamilton's equations."""

    x: np.ndarray
    p: np.ndarray
    weights: np.ndarray
    rng_seed: int = 0

    def __post_init__(self) -> None:
        self.x = np.asarray(self.x, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if not (self.x.shape == self.p.shape == self.weights.shape):
            raise ValueError("x, p, weights must share a shape")
        if abs(self.weights.sum() - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")

    def moments(self) -> tuple[float, float, float]:
        """Weighted (<x>, <p>, <x^2>)."""
        w = self.weights
        return (
            float(np.sum(w * self.x)),
            float(np.sum(w * self.p)),
            float(np.sum(w * self.x**2)),
        )


def gaussian_ensemble(
    n: int,
    x0: float,
    p0: float,
    sigma_x: float,
    sigma_p: float,
    seed: int = 0,
    sampler: str = "sobol",
) -> CharacteristicsEnsemble:
    """Gaussian ensemble; 'sobol' (scrambled, n rounded up to a power of 2)
    gives far lower moment noise than 'pseudo' at equal sample count."""
    if sampler == "sobol":
        from scipy.stats import norm, qmc

        m = int(np.ceil(np.log2(max(n, 2))))
        eng = qmc.Sobol(d=2, scramble=True, seed=seed)
        u = eng.random_base2(m)
        z = norm.ppf(u * (1 - 1e-12) + 0.5e-12)
    elif sampler == "pseudo":
        rng = np.random.Generator(np.random.Philox(seed))
        z = rng.standard_normal((n, 2))
    else:
        raise ValueError(f"unknown sampler {sampler!r}")
    x = x0 + sigma_x * z[:, 0]
    p = p0 + sigma_p * z[:, 1]
    w = np.full(x.shape, 1.0 / x.size)
    return CharacteristicsEnsemble(x=x, p=p, weights=w, rng_seed=seed)


def evolve_characteristics(
    v: PolynomialPotential,
    ensemble: CharacteristicsEnsemble,
    t: float,
    dt: float | None = None,
    mass: float = 1.0,
    drift_tol: float = 1e-6,
) -> CharacteristicsEnsemble:
    """Leapfrog (velocity Verlet) transport of every sample for time t.

    Raises EnergyDriftExceeded when the worst per-sample energy drift
    rate exceeds drift_tol per unit time (relative to the energy scale).
    """
    if t == 0.0:
        return ensemble
    if dt is None:
        dt = min(0.01, t / 100.0)
    n_steps = max(1, int(round(t / dt)))
    dt = t / n_steps
    x = ensemble.x.copy()
    p = ensemble.p.copy()
    e0 = p**2 / (2 * mass) + v.value(x)
    force = -v.derivative_value(x)
    for _ in range(n_steps):
        p_half = p + 0.5 * dt * force
        x = x + dt * p_half / mass
        force = -v.derivative_value(x)
        p = p_half + 0.5 * dt * force
    e1 = p**2 / (2 * mass) + v.value(x)
    scale = max(1.0, float(np.max(np.abs(e0))))
    drift_rate = float(np.max(np.abs(e1 - e0))) / (scale * abs(t))
    if drift_rate > drift_tol:
        raise EnergyDriftExceeded(
            f"energy drift {drift_rate:.3e} per unit time exceeds {drift_tol:g}; "
            "reduce dt"
        )
    return CharacteristicsEnsemble(
        x=x, p=p, weights=ensemble.weights.copy(), rng_seed=ensemble.rng_seed
    )
