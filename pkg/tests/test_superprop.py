import numpy as np
import pytest

from liouspace.errors import DimensionTooLarge, NonpositiveTime
from liouspace.evolution import EvolutionConfig, EvolveMethod, evolve_trotter
from liouspace.potential import PolynomialPotential, SuperPotentialKind
from liouspace.superprop import (
    PropagatorPoint,
    apply_free_superpropagator,
    apply_kernel,
    dyson_first_order_numeric,
    dyson_iterate,
    first_order_coefficients,
    first_order_superpropagator,
    free_moment_integral,
    free_propagator,
    free_superpropagator,
    gamma_cl,
    gamma_qm,
)
from liouspace.superspace import SuperGrid, expect_p, expect_x, gaussian_super_density


def closed_form_correction_field(grid, lam, kind, duration, sd):
    """Apply the closed-form first-order correction kernel to a state."""
    p = grid.points
    coef = first_order_coefficients(kind)
    n = grid.n
    corr = np.zeros((n, n), dtype=complex)
    g = free_propagator(p[:, None], p[None, :], duration)
    q_f = p[:, None, None, None]
    k_f = p[None, :, None, None]
    q_i = p[None, None, :, None]
    k_i = p[None, None, None, :]

    def p4(a, b):
        return a**4 + a**3 * b + a**2 * b**2 + a * b**3 + b**4

    def bracket(a, b):
        return (duration / 5.0) * (
            0.5j * duration * (3 * a**2 + 4 * a * b + 3 * b**2) + p4(a, b)
        )

    g_qm = bracket(q_f, q_i) - np.conj(bracket(k_f, k_i))
    sym = 3 * q_f * k_f + 2 * q_f * k_i + 2 * q_i * k_f + 3 * q_i * k_i

    def brk(a, ap, b, bp):
        return (
            a**3 * (4 * b + bp)
            + a**2 * ap * (3 * b + 2 * bp)
            + a * ap**2 * (2 * b + 3 * bp)
            + ap**3 * (b + 4 * bp)
        )

    g_cl = (duration / 5.0) * (
        1j * duration * sym
        + 0.5 * brk(q_f, q_i, k_f, k_i)
        - 0.5 * brk(k_f, k_i, q_f, q_i)
    )
    kernel = (
        g[:, None, :, None]
        * g.conj()[None, :, None, :]
        * (-1j * lam)
        * (coef.c1 * g_qm + coef.c2 * g_cl)
    )
    corr = np.einsum("abcd,cd->ab", kernel, sd.values) * grid.dq**2
    return corr


class TestFreePropagator:
    def test_modulus_at_unit_time(self):
        assert abs(free_propagator(0.3, 0.3, 1.0)) == pytest.approx(
            (2.0 * np.pi) ** -0.5, abs=1e-14
        )

    def test_modulus_independent_of_displacement(self):
        vals = free_propagator(np.linspace(-3, 3, 11), 0.0, 0.7)
        np.testing.assert_allclose(np.abs(vals), np.abs(vals[0]), rtol=1e-14)

    def test_nonpositive_time_raises(self):
        with pytest.raises(NonpositiveTime):
            free_propagator(0.0, 0.0, 0.0)

    def test_semigroup_by_oscillatory_quadrature(self):
        """int dz G0(x,z;T1) G0(z,y;T2) = G0(x,y;T1+T2); the tails are
        tapered smoothly so the non-decaying oscillation integrates out."""
        x, y, t1, t2 = 0.7, -0.4, 0.6, 0.9
        n = 2**17
        z = np.linspace(-80.0, 80.0, n)
        f = free_propagator(x, z, t1) * free_propagator(z, y, t2)
        window = np.ones(n)
        edge = n // 4
        ramp = 0.5 * (1.0 - np.cos(np.pi * np.arange(edge) / edge))
        window[:edge] *= ramp
        window[-edge:] *= ramp[::-1]
        val = np.sum(f * window) * (z[1] - z[0])
        want = complex(free_propagator(x, y, t1 + t2))
        assert abs(val - want) < 1e-4


class TestFreeSuperpropagator:
    def test_factorizes(self):
        pt = PropagatorPoint(0.5, -0.3, 1.1, 0.2, 0.8, mass=1.3, hbar=0.9)
        want = free_propagator(0.5, 1.1, 0.8, 1.3, 0.9) * np.conj(
            free_propagator(-0.3, 0.2, 0.8, 1.3, 0.9)
        )
        assert free_superpropagator(pt) == pytest.approx(complex(want), abs=1e-15)

    def test_diagonal_value_is_real_positive(self):
        pt = PropagatorPoint(0.7, 0.7, -0.2, -0.2, 1.3, mass=1.1)
        val = free_superpropagator(pt)
        assert val.imag == pytest.approx(0.0, abs=1e-15)
        assert val.real == pytest.approx(1.1 / (2 * np.pi * 1.3), abs=1e-12)

    def test_conjugation_symmetry_under_swap(self):
        pt = PropagatorPoint(0.4, -0.8, 1.2, 0.1, 0.6)
        swapped = PropagatorPoint(-0.8, 0.4, 0.1, 1.2, 0.6)
        assert free_superpropagator(pt) == pytest.approx(
            np.conj(free_superpropagator(swapped)), abs=1e-15
        )

    def test_gaussian_transport_matches_trotter(self):
        grid = SuperGrid.centered(8.0, 64)
        sd = gaussian_super_density(grid, -1.0, 1.2, 0.5, 0.6)
        out = apply_free_superpropagator(sd, 1.0)
        cfg = EvolutionConfig(t1=1.0, n_steps=1, method=EvolveMethod.TROTTER_STRANG)
        ref = evolve_trotter(
            PolynomialPotential.free(), grid, SuperPotentialKind.CL, sd, cfg
        )
        assert expect_x(out) == pytest.approx(expect_x(ref), abs=1e-4)
        assert expect_p(out) == pytest.approx(expect_p(ref), abs=1e-4)


class TestGammaFunctions:
    def test_gamma_qm_frozen_values(self):
        # independent symbolic evaluation, cross-checked against the Dyson
        # quadrature below
        assert gamma_qm(PropagatorPoint(1, 0, 1, 0, 1.0)) == pytest.approx(1 + 1j)
        assert gamma_qm(PropagatorPoint(1, 1, 0, 0, 1.0)) == pytest.approx(0.6j)

    def test_gamma_cl_frozen_values(self):
        assert gamma_cl(PropagatorPoint(1, 0, 1, 0, 1.0)) == pytest.approx(0.0)
        assert gamma_cl(PropagatorPoint(1, 1, 0, 0, 1.0)) == pytest.approx(0.6j)

    def test_purely_imaginary_on_bra_ket_diagonal(self):
        rng = np.random.Generator(np.random.Philox(51))
        for _ in range(20):
            a, b = rng.uniform(-2, 2, size=2)
            t = rng.uniform(0.2, 1.5)
            pt = PropagatorPoint(a, a, b, b, t)
            assert gamma_qm(pt).real == pytest.approx(0.0, abs=1e-12)
            assert gamma_cl(pt).real == pytest.approx(0.0, abs=1e-12)

    def test_exchange_structure(self):
        # Gamma(Q,q;Q',q') = -conj(Gamma(q,Q;q',Q')) for both functions
        rng = np.random.Generator(np.random.Philox(52))
        for _ in range(20):
            qf, kf, qi, ki = rng.uniform(-2, 2, size=4)
            t = rng.uniform(0.2, 1.5)
            pt = PropagatorPoint(qf, kf, qi, ki, t)
            sw = PropagatorPoint(kf, qf, ki, qi, t)
            assert gamma_qm(pt) == pytest.approx(-np.conj(gamma_qm(sw)), abs=1e-12)
            assert gamma_cl(pt) == pytest.approx(-np.conj(gamma_cl(sw)), abs=1e-12)

    def test_coefficients(self):
        assert first_order_coefficients(SuperPotentialKind.QM).c1 == 1.0
        assert first_order_coefficients(SuperPotentialKind.QM).c2 == 0.0
        assert first_order_coefficients(SuperPotentialKind.CL).c1 == 0.5
        assert first_order_coefficients(SuperPotentialKind.CL).c2 == 0.5


class TestFirstOrder:
    def test_lambda_zero_gives_free(self):
        pt = PropagatorPoint(0.4, -0.2, 0.9, 0.3, 0.7)
        assert first_order_superpropagator(
            pt, 0.0, SuperPotentialKind.CL
        ) == pytest.approx(free_superpropagator(pt))

    def test_cl_correction_is_half_qm_where_gamma_cl_vanishes(self):
        # at (1,0,1,0) Gamma_CL = 0, so the classical correction is the
        # quantum one reduced by the overall factor 1/2
        pt = PropagatorPoint(1, 0, 1, 0, 1.0)
        g0 = free_superpropagator(pt)
        d_cl = first_order_superpropagator(pt, 0.3, SuperPotentialKind.CL) - g0
        d_qm = first_order_superpropagator(pt, 0.3, SuperPotentialKind.QM) - g0
        assert d_cl == pytest.approx(0.5 * d_qm, abs=1e-14)

    def test_closed_form_matches_dyson_quadrature(self):
        """Both coefficient sets against the independent moment-reduced
        triple integral, at 10 random endpoint tuples."""
        rng = np.random.Generator(np.random.Philox(53))
        lam = 0.4
        for _ in range(10):
            ends = rng.uniform(-1.5, 1.5, size=4)
            t = rng.uniform(0.3, 1.2)
            m, hb = rng.uniform(0.7, 1.4), rng.uniform(0.7, 1.4)
            pt = PropagatorPoint(*ends, t, mass=m, hbar=hb)
            for kind in SuperPotentialKind:
                closed = first_order_superpropagator(pt, lam, kind) - free_superpropagator(pt)
                numeric = dyson_first_order_numeric(pt, lam, kind)
                assert abs(closed - numeric) < 1e-3 * max(abs(closed), 1e-12)

    def test_dyson_zero_coupling(self):
        pt = PropagatorPoint(0.5, 0.1, -0.3, 0.8, 0.9)
        assert dyson_first_order_numeric(pt, 0.0, SuperPotentialKind.QM) == 0.0

    def test_dyson_linear_in_lambda(self):
        pt = PropagatorPoint(0.5, 0.1, -0.3, 0.8, 0.9)
        one = dyson_first_order_numeric(pt, 0.25, SuperPotentialKind.CL)
        two = dyson_first_order_numeric(pt, 0.5, SuperPotentialKind.CL)
        assert two == pytest.approx(2.0 * one, abs=1e-12 * abs(two))

    def test_first_order_correction_scales_linearly_in_duration(self):
        """At small T the polynomial part of Gamma dominates and the
        relative correction magnitude grows with slope 1 in log T."""
        lam = 0.2
        durations = np.geomspace(0.01, 0.1, 6)
        mags = []
        for t in durations:
            pt = PropagatorPoint(1.1, -0.4, 0.6, 0.2, t)
            combo = 0.5 * gamma_qm(pt) + 0.5 * gamma_cl(pt)
            mags.append(abs(lam * combo))
        slope = np.polyfit(np.log(durations), np.log(mags), 1)[0]
        assert slope == pytest.approx(1.0, abs=0.1)

    def test_moment_integral_semigroup(self):
        # k = 0 reduces to the semigroup identity: M_0 / G0(total) = 1
        val = free_moment_integral(0.7, -0.2, 0.4, 0.9, 0, 1.0, 1.0)
        assert val == pytest.approx(1.0, abs=1e-14)


@pytest.mark.filterwarnings("ignore:initial density")
class TestDysonIterate:
    def test_order_zero_is_free_kernel(self):
        """The order-0 kernel is the band-limited free superpropagator:
        exactly the one-step free split-step evolution, and close to the
        pointwise analytic kernel action at resolved durations."""
        grid = SuperGrid.centered(5.5, 24)
        v = PolynomialPotential.quartic(0.02)
        sd = gaussian_super_density(grid, 0.0, 0.0, 0.7, 0.75)
        k0 = dyson_iterate(grid, v, SuperPotentialKind.CL, 0, 1.0, n_tau=4)
        out = apply_kernel(k0, sd)
        cfg = EvolutionConfig(t1=1.0, n_steps=1, method=EvolveMethod.TROTTER_STRANG)
        ref = evolve_trotter(
            PolynomialPotential.free(), grid, SuperPotentialKind.CL, sd, cfg
        )
        np.testing.assert_allclose(out.values, ref.values, atol=1e-13)
        pointwise = apply_free_superpropagator(sd, 1.0)
        scale = np.max(np.abs(out.values))
        assert np.max(np.abs(out.values - pointwise.values)) < 5e-3 * scale

    @pytest.mark.parametrize("kind", list(SuperPotentialKind))
    def test_order_one_matches_closed_form(self, kind):
        """First-order kernel action on a band-limited state vs the closed
        form, in the relative L2 norm of the correction field."""
        grid = SuperGrid.centered(7.0, 32)
        lam, duration = 0.02, 1.0
        v = PolynomialPotential.quartic(lam)
        sd = gaussian_super_density(grid, 0.0, 0.0, 0.7, 0.5)
        k0 = dyson_iterate(grid, v, kind, 0, duration, n_tau=4)
        k1 = dyson_iterate(grid, v, kind, 1, duration, n_tau=16)
        corr = np.einsum("abcd,cd->ab", k1 - k0, sd.values) * grid.dq**2
        want = closed_form_correction_field(grid, lam, kind, duration, sd)
        rel = np.linalg.norm(corr - want) / np.linalg.norm(want)
        assert rel < 1e-2

    def test_error_monotone_in_order(self):
        """At small lam*T each added Dyson order moves the propagated state
        closer to the converged split-step evolution."""
        grid = SuperGrid.centered(5.5, 20)
        lam, duration = 0.02, 1.0
        v = PolynomialPotential.quartic(lam)
        kind = SuperPotentialKind.CL
        sd = gaussian_super_density(grid, 0.0, 0.0, 0.7, 0.75)
        cfg = EvolutionConfig(
            t1=duration, n_steps=400, method=EvolveMethod.TROTTER_STRANG
        )
        ref = evolve_trotter(v, grid, kind, sd, cfg)
        errs = []
        for order in (0, 1, 2):
            kern = dyson_iterate(grid, v, kind, order, duration, n_tau=12)
            out = apply_kernel(kern, sd)
            errs.append(np.max(np.abs(out.values - ref.values)))
        assert errs[0] > errs[1] > errs[2]

    def test_large_grid_rejected(self):
        grid = SuperGrid.centered(5.0, 64)
        with pytest.raises(DimensionTooLarge):
            dyson_iterate(
                grid, PolynomialPotential.quartic(0.1), SuperPotentialKind.CL, 1, 1.0
            )

    def test_nonpositive_time_rejected(self):
        grid = SuperGrid.centered(5.0, 16)
        with pytest.raises(NonpositiveTime):
            dyson_iterate(
                grid, PolynomialPotential.quartic(0.1), SuperPotentialKind.CL, 1, 0.0
            )
