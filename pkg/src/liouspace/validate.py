"""Self-contained invariant suite backing the `validate` CLI subcommand.

Each check exercises one contract of the library against an independent
route (symbolic identity, quadrature, characteristics, closed form) and
returns pass/fail with a short detail string.  The suite is a quick
smoke screen, not a replacement for the full pytest suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import (
    entangle,
    evolution,
    jaynescummings as jc,
    liouvillian,
    potential,
    superprop,
    superspace,
)
from .potential import PolynomialPotential, SuperPotentialKind


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check_e_antisymmetry() -> tuple[bool, str]:
    rng = np.random.Generator(np.random.Philox(11))
    worst = 0.0
    for _ in range(20):
        v = PolynomialPotential(tuple(rng.uniform(-1, 1, size=5)))
        qb, qk = rng.uniform(-3, 3, size=(2, 25))
        e = potential.e_superoperator(v, qb, qk)
        scale = max(1.0, float(np.max(np.abs(e))))
        worst = max(worst, float(np.max(np.abs(e + potential.e_superoperator(v, qk, qb)))) / scale)
    return worst < 1e-12, f"max antisymmetry defect {worst:.2e}"


def _check_degree2_kill() -> tuple[bool, str]:
    rng = np.random.Generator(np.random.Philox(12))
    worst = 0.0
    for _ in range(20):
        v = PolynomialPotential(tuple(rng.uniform(-2, 2, size=3)))
        worst = max(worst, potential.max_abs_e_on_grid(v))
    return worst < 1e-12, f"max |E| for quadratic potentials {worst:.2e}"


def _check_quartic_identity() -> tuple[bool, str]:
    rng = np.random.Generator(np.random.Philox(13))
    lam = 0.7
    qb, qk = rng.uniform(-2, 2, size=(2, 200))
    got = potential.super_potential(PolynomialPotential.quartic(lam), SuperPotentialKind.CL, qb, qk)
    want = 0.5 * lam * (qb**4 - qk**4 + 2 * (qb**3 * qk - qb * qk**3))
    err = float(np.max(np.abs(got - want)) / np.max(np.abs(want)))
    return err < 1e-12, f"relative defect {err:.2e}"


def _check_commutator_identity() -> tuple[bool, str]:
    rng = np.random.Generator(np.random.Philox(14))
    h = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    h = 0.5 * (h + h.conj().T)
    rho = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    liou = liouvillian.build_basis_liouvillian(h)
    err = float(np.max(np.abs(liou.apply(rho) - (h @ rho - rho @ h))))
    return err < 1e-12, f"max defect {err:.2e}"


def _check_spectral_symmetry() -> tuple[bool, str]:
    rng = np.random.Generator(np.random.Philox(15))
    h = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    h = 0.5 * (h + h.conj().T)
    eig_qm = liouvillian.spectrum(liouvillian.build_basis_liouvillian(h))
    grid = superspace.SuperGrid.centered(4.0, 16)
    op = liouvillian.build_grid_liouvillian(
        PolynomialPotential.quartic(0.5), grid, SuperPotentialKind.CL
    )
    eig_cl = liouvillian.spectrum(op)
    d1 = liouvillian.spectral_symmetry_defect(eig_qm)
    d2 = liouvillian.spectral_symmetry_defect(eig_cl)
    return max(d1, d2) < 1e-8, f"defects qm={d1:.2e} cl={d2:.2e}"


def _check_transform_roundtrip() -> tuple[bool, str]:
    grid = superspace.SuperGrid.centered(7.0, 64)
    pg = grid.matched_phase_grid()
    pd = superspace.gaussian_phase_density(pg, 0.8, -0.4, 0.6, 0.7)
    sd = superspace.phase_to_super(pd, grid)
    herm = sd.hermiticity_defect()
    back = superspace.super_to_phase(sd)
    rt = float(np.max(np.abs(back.values - pd.values)))
    tr = abs(superspace.trace(sd) - pd.norm())
    ok = herm < 1e-10 and rt < 1e-8 and tr < 1e-8
    return ok, f"herm {herm:.2e}, roundtrip {rt:.2e}, trace drift {tr:.2e}"


def _check_moments() -> tuple[bool, str]:
    grid = superspace.SuperGrid.centered(8.0, 64)
    sd = superspace.gaussian_super_density(grid, 1.5, -0.5, 0.7, 0.6)
    ex = abs(superspace.expect_x(sd) - 1.5)
    ep = abs(superspace.expect_p(sd) + 0.5)
    exp_xy = abs(superspace.expect_xp_weyl(sd) - 1.5 * (-0.5))
    ok = max(ex, ep, exp_xy) < 1e-6
    return ok, f"|dx|={ex:.2e} |dp|={ep:.2e} |dxp|={exp_xy:.2e}"


def _check_free_transport() -> tuple[bool, str]:
    grid = superspace.SuperGrid.centered(8.0, 64)
    sd = superspace.gaussian_super_density(grid, -1.0, 1.2, 0.5, 0.65)
    cfg = evolution.EvolutionConfig(t1=1.0, n_steps=1, method=evolution.EvolveMethod.TROTTER_STRANG)
    out = evolution.evolve_trotter(PolynomialPotential.free(), grid, SuperPotentialKind.CL, sd, cfg)
    err = abs(superspace.expect_x(out) - (-1.0 + 1.2 * 1.0))
    return err < 1e-4, f"ballistic <x> error {err:.2e}"


def _check_harmonic_cl_equals_qm() -> tuple[bool, str]:
    grid = superspace.SuperGrid.centered(8.0, 64)
    sd = superspace.gaussian_super_density(grid, 0.8, 0.0, 0.6, 0.8)
    v = PolynomialPotential.harmonic(1.0)
    cfg = evolution.EvolutionConfig(t1=1.0, n_steps=64, method=evolution.EvolveMethod.TROTTER_STRANG)
    out_cl = evolution.evolve_trotter(v, grid, SuperPotentialKind.CL, sd, cfg)
    out_qm = evolution.evolve_trotter(v, grid, SuperPotentialKind.QM, sd, cfg)
    err = float(np.max(np.abs(out_cl.values - out_qm.values)))
    return err < 1e-10, f"max CL-QM deviation {err:.2e}"


def _check_gamma_vs_dyson() -> tuple[bool, str]:
    rng = np.random.Generator(np.random.Philox(16))
    worst = 0.0
    for _ in range(3):
        pt = superprop.PropagatorPoint(*rng.uniform(-1.2, 1.2, size=4), duration=rng.uniform(0.4, 1.0))
        for kind in SuperPotentialKind:
            closed = superprop.first_order_superpropagator(pt, 0.3, kind) - superprop.free_superpropagator(pt)
            numeric = superprop.dyson_first_order_numeric(pt, 0.3, kind)
            worst = max(worst, abs(closed - numeric) / max(abs(closed), 1e-30))
    return worst < 1e-3, f"worst relative defect {worst:.2e}"


def _check_vacuum_rabi() -> tuple[bool, str]:
    p = jc.JCParams(omega_e=1.0, omega=1.0, d_eg=0.05, n_max=4)
    rho0 = jc.initial_jc_state("e0", p.n_max)
    worst = 0.0
    for t in np.linspace(0.0, np.pi / 0.05, 7):
        rho = jc.jc_evolve_exact(p, rho0, float(t))
        worst = max(worst, abs(jc.excited_population(rho, p.n_max) - np.cos(0.05 * t) ** 2))
    return worst < 1e-6, f"max |P_e - cos^2| = {worst:.2e}"


def _check_jc_first_order_scaling() -> tuple[bool, str]:
    p = jc.JCParams(omega_e=1.1, omega=0.9, d_eg=0.02, n_max=3,
                    eps_egeg=0.01 * (0.6 + 0.8j))
    # atom populations only: initial atom coherences feed the diagonal
    # blocks at first order in the dipole, which the short-time formula
    # does not track
    atom = np.diag([0.4, 0.6]).astype(complex)
    rho0 = np.kron(atom, jc.coherent_field_density(0.4, p.n_max))
    devs = []
    for t in (0.4, 0.2):
        d = np.max(np.abs(jc.jc_evolve_first_order(p, rho0, t) - jc.jc_evolve_exact(p, rho0, t)))
        devs.append(float(d))
    ratio = devs[0] / devs[1]
    return abs(ratio - 4.0) < 1.0, f"halving ratio {ratio:.2f}"


def _check_bipartite_audit() -> tuple[bool, str]:
    basis = entangle.BipartiteBasis(n_levels=3)
    lam = 0.3
    dense_cl = entangle.build_bipartite_liouvillian(basis, lam, SuperPotentialKind.CL).dense()
    dense_qm = entangle.build_bipartite_liouvillian(basis, lam, SuperPotentialKind.QM).dense()
    cross = entangle.interaction_terms(
        basis, lam,
        classes={potential.MonomialClass.INTRA_SUBSYSTEM_MIXED,
                 potential.MonomialClass.INTER_SPACE_CROSS},
    )
    err = float(np.max(np.abs(dense_cl - dense_qm - cross)))
    return err < 1e-10, f"audit defect {err:.2e}"


def _check_characteristics_vs_grid() -> tuple[bool, str]:
    v = PolynomialPotential.quartic(0.1)
    grid = superspace.SuperGrid.centered(8.0, 128)
    sd = superspace.gaussian_super_density(grid, 1.0, 0.0, 0.4, 0.6)
    cfg = evolution.EvolutionConfig(t1=0.5, n_steps=100, method=evolution.EvolveMethod.TROTTER_STRANG)
    out = evolution.evolve_trotter(v, grid, SuperPotentialKind.CL, sd, cfg)
    ens = evolution.gaussian_ensemble(2**14, 1.0, 0.0, 0.4, 0.6, seed=5)
    ens = evolution.evolve_characteristics(v, ens, 0.5, dt=5e-4)
    mx, mp, mx2 = ens.moments()
    errs = (
        abs(superspace.expect_x(out) - mx),
        abs(superspace.expect_p(out) - mp),
        abs(superspace.expect_x2(out) - mx2),
    )
    return max(errs) < 2e-3, f"moment gaps {errs[0]:.1e}/{errs[1]:.1e}/{errs[2]:.1e}"


CHECKS: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
    ("superoperator antisymmetry", _check_e_antisymmetry),
    ("degree<=2 superoperator kill", _check_degree2_kill),
    ("quartic superpotential identity", _check_quartic_identity),
    ("basis Liouvillian commutator identity", _check_commutator_identity),
    ("spectral symmetry about zero", _check_spectral_symmetry),
    ("phase/super transform roundtrip", _check_transform_roundtrip),
    ("superspace moments vs phase space", _check_moments),
    ("free ballistic transport", _check_free_transport),
    ("harmonic CL == QM evolution", _check_harmonic_cl_equals_qm),
    ("first-order propagator vs Dyson quadrature", _check_gamma_vs_dyson),
    ("vacuum Rabi oscillation", _check_vacuum_rabi),
    ("JC first-order t^2 consistency", _check_jc_first_order_scaling),
    ("bipartite generator audit", _check_bipartite_audit),
    ("grid CL vs characteristics oracle", _check_characteristics_vs_grid),
]


def run_validation() -> list[CheckResult]:
    results = []
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(CheckResult(name=name, passed=ok, detail=detail))
    return results
