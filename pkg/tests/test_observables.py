import math

import numpy as np
import pytest

from qdho import fock, observables


def trunc_of(dim, support=None):
    support = dim - 1 if support is None else support
    return fock.TruncationConfig(dim=dim, support_max=support, guard=dim - 1 - support)


def random_hermitian(dim, rng, scale=1.0):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * 0.5 * (g + g.conj().T)


class TestExpectN:
    @pytest.mark.parametrize("n", [0, 1, 3])
    def test_number_states(self, n):
        assert observables.expect_n(fock.fock_state(n, trunc_of(6))) == n

    def test_thermal_mean(self):
        rho = fock.thermal_state(1.0, trunc_of(40))
        assert abs(observables.expect_n(rho) - 1.0) <= 1e-8

    def test_coherent_mean(self):
        rho = fock.coherent_state(1.5, trunc_of(30, support=16))
        assert abs(observables.expect_n(rho) - 2.25) <= 1e-8

    def test_accepts_operator_set(self):
        trunc = trunc_of(6)
        ops = fock.build_operators(trunc, theta=0.4)
        rho = fock.fock_state(2, trunc)
        assert observables.expect_n(rho, ops) == 2.0

    def test_rejects_dimension_mismatch(self):
        ops = fock.build_operators(trunc_of(5))
        with pytest.raises(ValueError):
            observables.expect_n(fock.fock_state(0, trunc_of(4)), ops)


class TestPurity:
    def test_pure_states(self):
        assert observables.purity(fock.fock_state(2, trunc_of(5))) == 1.0

    def test_maximally_mixed(self):
        dim = 8
        rho = np.eye(dim, dtype=complex) / dim
        assert abs(observables.purity(rho) - 1.0 / dim) <= 1e-15

    def test_thermal_purity(self):
        rho = fock.thermal_state(0.5, trunc_of(30))
        assert abs(observables.purity(rho) - 0.5) <= 1e-8


class TestFrobeniusDistance:
    def test_zero_on_equal(self):
        rho = fock.coherent_state(0.8, trunc_of(12, support=4))
        assert observables.frobenius_distance(rho, rho) == 0.0

    def test_orthogonal_projectors(self):
        a = fock.fock_state(0, trunc_of(4))
        b = fock.fock_state(1, trunc_of(4))
        assert abs(observables.frobenius_distance(a, b) - np.sqrt(2)) <= 1e-15

    def test_symmetry_and_triangle_inequality(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            a, b, c = (random_hermitian(5, rng) for _ in range(3))
            dab = observables.frobenius_distance(a, b)
            dba = observables.frobenius_distance(b, a)
            assert dab == dba
            assert dab <= observables.frobenius_distance(a, c) + observables.frobenius_distance(c, b) + 1e-12

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ValueError):
            observables.frobenius_distance(np.eye(3), np.eye(4))


class TestHermitianEigenvalues:
    def test_diagonal_is_sorted(self):
        result = observables.hermitian_eigenvalues(np.diag([3.0, 1.0, 2.0]).astype(complex))
        np.testing.assert_allclose(result.eigenvalues, [1.0, 2.0, 3.0], atol=1e-14)

    def test_pauli_x_spectrum(self):
        result = observables.hermitian_eigenvalues(np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(result.eigenvalues, [-1.0, 1.0], atol=1e-14)

    def test_random_hermitian_residuals_and_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(5):
            m = random_hermitian(8, rng)
            result = observables.hermitian_eigenvalues(m, tol=1e-13)
            # Eigenpair residual against the returned eigenvectors.
            for k in range(8):
                v = result.eigenvectors[:, k]
                residual = np.linalg.norm(m @ v - result.eigenvalues[k] * v)
                assert residual <= 1e-9 * max(1.0, np.abs(m).max())
            # Independent oracle.
            np.testing.assert_allclose(
                result.eigenvalues, np.linalg.eigvalsh(m), atol=1e-11
            )
            assert abs(result.eigenvalues.sum() - np.trace(m).real) <= 1e-10
            assert result.residual <= 1e-13
            assert result.iterations > 0

    def test_complex_phase_handling(self):
        m = np.array([[1.0, 1j], [-1j, 1.0]])
        result = observables.hermitian_eigenvalues(m)
        np.testing.assert_allclose(result.eigenvalues, [0.0, 2.0], atol=1e-13)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            observables.hermitian_eigenvalues(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestPhotonDistribution:
    def test_number_state(self):
        dist = observables.photon_distribution(fock.fock_state(2, trunc_of(5)))
        np.testing.assert_array_equal(dist, [0, 0, 1, 0, 0])

    def test_thermal_geometric_weights(self):
        dim = 40
        dist = observables.photon_distribution(fock.thermal_state(1.0, trunc_of(dim)))
        expected = 0.5 ** (np.arange(dim) + 1)
        np.testing.assert_allclose(dist, expected, atol=1e-8)
        assert abs(dist.sum() - 1.0) <= 1e-12

    def test_coherent_poisson_weights(self):
        dim = 24
        dist = observables.photon_distribution(fock.coherent_state(1.0, trunc_of(dim, support=9)))
        expected = np.array([np.exp(-1.0) / math.factorial(k) for k in range(dim)])
        np.testing.assert_allclose(dist, expected, atol=1e-8)
