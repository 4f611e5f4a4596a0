import warnings

import numpy as np
import pytest

from qdho import fock, liouville, observables, propagator
from qdho.verification import random_interior_density


def trunc_of(dim, support=None):
    support = dim - 1 if support is None else support
    return fock.TruncationConfig(dim=dim, support_max=support, guard=dim - 1 - support)


def interior_state(dim, support, seed):
    rng = np.random.default_rng(seed)
    return fock.DensityMatrix(
        mat=random_interior_density(dim, support, rng), trunc=trunc_of(dim, support)
    )


class TestPlan:
    def test_plan_fields(self):
        trunc = trunc_of(9)
        plan = propagator.make_plan(fock.ModelParams(omega=1, mu=2, nu=1), trunc, 1.0)
        assert plan.max_series_index == 8
        assert plan.prefactor > 0
        np.testing.assert_allclose(
            plan.prefactor, np.exp(0.5) / plan.coeffs.f_coef, rtol=1e-15
        )

    def test_prefactor_positive_in_gain_regime(self):
        plan = propagator.make_plan(fock.ModelParams(mu=0.2, nu=0.9), trunc_of(6), 2.0)
        assert plan.prefactor > 0


class TestEvolveLindbladOnly:
    def test_t_zero_returns_state_exactly(self):
        rho0 = fock.coherent_state(1.0, trunc_of(14))
        out = propagator.evolve_lindblad_only(rho0, 1.3, 0.2, 0.0)
        np.testing.assert_array_equal(out.mat, rho0.mat)

    def test_vacuum_fixed_point_without_pump(self):
        rho0 = fock.fock_state(0, trunc_of(8))
        out = propagator.evolve_lindblad_only(rho0, 1.0, 0.0, 2.0)
        np.testing.assert_allclose(out.mat, rho0.mat, atol=1e-15)

    def test_single_excitation_decay_law(self):
        # |1><1| -> e^{-mu t}|1><1| + (1 - e^{-mu t})|0><0|; checked against
        # the closed form and the superoperator-exponential oracle.
        dim = 8
        rho0 = fock.fock_state(1, trunc_of(dim))
        for mu, t in [(1.0, 0.5), (1.0, 2.0), (0.3, 3.0)]:
            out = propagator.evolve_lindblad_only(rho0, mu, 0.0, t)
            expected = np.zeros((dim, dim), dtype=complex)
            expected[0, 0] = 1 - np.exp(-mu * t)
            expected[1, 1] = np.exp(-mu * t)
            np.testing.assert_allclose(out.mat, expected, atol=1e-13)
            oracle = liouville.evolve_numeric_expm(
                rho0, fock.ModelParams(mu=mu, nu=0.0), t
            )
            np.testing.assert_allclose(out.mat, oracle.mat, atol=1e-12)

    def test_rejects_negative_time(self):
        with pytest.raises(ValueError):
            propagator.evolve_lindblad_only(fock.fock_state(0, trunc_of(4)), 1.0, 0.0, -1.0)

    def test_rejects_invalid_state(self):
        bad = fock.DensityMatrix(
            mat=np.diag([0.7, 0.7, -0.4, 0.0]).astype(complex), trunc=trunc_of(4)
        )
        with pytest.raises(fock.ValidationError):
            propagator.evolve_lindblad_only(bad, 1.0, 0.0, 1.0)


class TestEvolveAnalytic:
    def test_t_zero_returns_state_exactly(self):
        rho0 = fock.thermal_state(0.4, trunc_of(16))
        out = propagator.evolve_analytic(rho0, fock.ModelParams(omega=3, mu=1, nu=0.2), 0.0)
        np.testing.assert_array_equal(out.mat, rho0.mat)

    def test_diagonal_state_ignores_rotation(self):
        # Diagonal rho commutes with N, so the e^{-i w t N} factors cancel
        # and the full evolution equals the dissipator-only one.
        rho0 = fock.thermal_state(0.4, trunc_of(16))
        full = propagator.evolve_analytic(rho0, fock.ModelParams(omega=4.2, mu=0.8, nu=0.3), 0.9)
        lindblad = propagator.evolve_lindblad_only(rho0, 0.8, 0.3, 0.9)
        np.testing.assert_allclose(full.mat, lindblad.mat, atol=1e-15)

    def test_coherent_state_against_expm_oracle(self):
        trunc = trunc_of(24, support=9)
        rho0 = fock.coherent_state(1.0, trunc)
        params = fock.ModelParams(omega=2 * np.pi, mu=0.5, nu=0.0)
        out = propagator.evolve_analytic(rho0, params, 1.0)
        oracle = liouville.evolve_numeric_expm(rho0, params, 1.0)
        assert observables.frobenius_distance(out, oracle) <= 1e-8

    def test_populations_independent_of_omega(self):
        rho0 = fock.coherent_state(1.2, trunc_of(20, support=9))
        diags = []
        for omega in (0.0, 1.0, 10.0):
            out = propagator.evolve_analytic(
                rho0, fock.ModelParams(omega=omega, mu=0.7, nu=0.2), 1.1
            )
            diags.append(np.real(np.diag(out.mat)))
        np.testing.assert_allclose(diags[0], diags[1], atol=1e-12)
        np.testing.assert_allclose(diags[0], diags[2], atol=1e-12)

    def test_output_hermitian_and_nearly_pure_trace(self):
        # Random interior states carry O(1) weight at their support edge, so
        # the guard band is sized for the pump (nu t ~ 0.45 needs ~18 levels).
        rho0 = interior_state(28, 8, seed=1)
        out = propagator.evolve_analytic(rho0, fock.ModelParams(omega=1, mu=1, nu=0.3), 1.5)
        assert np.abs(out.mat - out.mat.conj().T).max() <= 1e-12
        assert abs(np.trace(out.mat).real - 1.0) <= 1e-8
        assert observables.purity(out) <= 1.0 + 1e-10

    def test_semigroup_property(self):
        rho0 = interior_state(26, 8, seed=2)
        params = fock.ModelParams(omega=2.0, mu=0.9, nu=0.2)
        stepped = propagator.evolve_analytic(
            propagator.evolve_analytic(rho0, params, 0.6), params, 0.9
        )
        direct = propagator.evolve_analytic(rho0, params, 1.5)
        assert observables.frobenius_distance(stepped, direct) <= 1e-8

    def test_theta_invariance(self):
        rho0 = interior_state(14, 8, seed=3)
        outs = [
            propagator.evolve_analytic(
                rho0, fock.ModelParams(omega=1.5, mu=1.0, nu=0.4, theta=theta), 0.8
            ).mat
            for theta in (0.0, np.pi / 3, np.pi)
        ]
        np.testing.assert_allclose(outs[0], outs[1], atol=1e-12)
        np.testing.assert_allclose(outs[0], outs[2], atol=1e-12)

    def test_degenerate_rates_run_through_limit_branch(self):
        rho0 = fock.fock_state(2, trunc_of(20))
        params = fock.ModelParams(omega=1.0, mu=0.5, nu=0.5)
        with warnings.catch_warnings():
            warnings.simplefilter("error")  # must not warn: nu == mu is not gain
            out = propagator.evolve_analytic(rho0, params, 0.8)
        oracle = liouville.evolve_numeric_expm(rho0, params, 0.8)
        assert observables.frobenius_distance(out, oracle) <= 1e-8

    def test_gain_regime_warns(self):
        rho0 = fock.fock_state(0, trunc_of(16))
        with pytest.warns(propagator.GainWarning):
            propagator.evolve_analytic(rho0, fock.ModelParams(mu=0.2, nu=0.6), 0.5)


class TestEvolveNuZero:
    def test_vacuum_fixed(self):
        rho0 = fock.fock_state(0, trunc_of(6))
        out = propagator.evolve_nu_zero(rho0, 0.7, 2.0, 3.0)
        np.testing.assert_allclose(out.mat, rho0.mat, atol=1e-15)

    def test_half_life_populations(self):
        # mu = ln 2, t = 1: e^{-mu t} = 1/2 exactly.
        rho0 = fock.fock_state(1, trunc_of(6))
        out = propagator.evolve_nu_zero(rho0, np.log(2.0), 0.0, 1.0)
        expected = np.zeros((6, 6), dtype=complex)
        expected[0, 0] = 0.5
        expected[1, 1] = 0.5
        np.testing.assert_allclose(out.mat, expected, atol=1e-15)

    def test_pure_rotation_flips_coherence_sign(self):
        # mu = 0 reduces to the unitary rotation e^{-i w t N} rho e^{+i w t N};
        # at w t = pi the 01-coherence picks up e^{i pi} = -1.
        mat = np.zeros((4, 4), dtype=complex)
        mat[:2, :2] = 0.5
        rho0 = fock.DensityMatrix(mat=mat, trunc=trunc_of(4))
        out = propagator.evolve_nu_zero(rho0, 0.0, np.pi, 1.0)
        expected = mat.copy()
        expected[0, 1] = -0.5
        expected[1, 0] = -0.5
        np.testing.assert_allclose(out.mat, expected, atol=1e-15)

    def test_matches_analytic_on_random_instances(self):
        rng = np.random.default_rng(10)
        for seed in range(10):
            rho0 = interior_state(12, 8, seed=100 + seed)
            mu = float(rng.uniform(0.05, 2.0))
            omega = float(rng.uniform(0.0, 5.0))
            t = float(rng.uniform(0.0, 3.0))
            direct = propagator.evolve_nu_zero(rho0, mu, omega, t)
            via_full = propagator.evolve_analytic(
                rho0, fock.ModelParams(omega=omega, mu=mu, nu=0.0), t
            )
            assert np.abs(direct.mat - via_full.mat).max() <= 1e-12

    def test_mean_occupation_decays_exponentially(self):
        rho0 = interior_state(14, 8, seed=4)
        n0 = observables.expect_n(rho0)
        for mu, omega, t in [(0.8, 0.0, 1.0), (0.8, 3.0, 2.5), (1.5, 1.0, 0.4)]:
            out = propagator.evolve_nu_zero(rho0, mu, omega, t)
            assert abs(observables.expect_n(out) - np.exp(-mu * t) * n0) <= 1e-8
        # The law is verified against both oracles as well, not assumed.
        mu, omega, t = 0.8, 3.0, 1.0
        params = fock.ModelParams(omega=omega, mu=mu, nu=0.0)
        target = np.exp(-mu * t) * n0
        assert abs(observables.expect_n(liouville.evolve_numeric_expm(rho0, params, t)) - target) <= 1e-8
        steps = 2 * liouville.stability_steps(params, rho0.dim, t)
        assert abs(observables.expect_n(liouville.evolve_numeric_rk4(rho0, params, t, steps)) - target) <= 1e-8


class TestTruncationBehaviour:
    def test_block_stability_of_series(self):
        # The evolved matrix at dim D equals the top-left block of the
        # evolution at dim 2D exactly: raising chains that leave the block
        # never come back, so truncating the series only discards population
        # above the cutoff (it never corrupts retained entries).
        rho0 = interior_state(12, 8, seed=5)
        params = fock.ModelParams(omega=1.0, mu=0.5, nu=0.5)
        small = propagator.evolve_analytic(rho0, params, 2.0)
        big_trunc = rho0.trunc.doubled()
        big_mat = np.zeros((24, 24), dtype=complex)
        big_mat[:12, :12] = rho0.mat
        big = propagator.evolve_analytic(
            fock.DensityMatrix(mat=big_mat, trunc=big_trunc), params, 2.0
        )
        assert np.abs(big.mat[:12, :12] - small.mat).max() <= 1e-15

    def test_escape_distance_small_for_damped_run(self):
        rho0 = fock.coherent_state(1.0, trunc_of(24, support=9))
        dist = propagator.doubled_truncation_distance(
            rho0, fock.ModelParams(omega=1.0, mu=1.0, nu=0.2), 2.0
        )
        assert dist <= 1e-9

    def test_escape_distance_flags_underprovisioned_run(self):
        rho0 = fock.fock_state(3, trunc_of(12))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            dist = propagator.doubled_truncation_distance(
                rho0, fock.ModelParams(omega=0.0, mu=0.5, nu=0.5), 3.0
            )
        assert dist > 1e-6
