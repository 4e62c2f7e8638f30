import numpy as np
import pytest

from specsense import (
    CovMatrix,
    PowerIterConfig,
    extreme_eigenvalues,
    jacobi_eigensystem,
    leading_eigenvector,
    min_eigenvalue,
)
from specsense.errors import DimensionTooLargeError, NoConvergenceError

from conftest import random_spd


def cov(values) -> CovMatrix:
    return CovMatrix(values=np.asarray(values, dtype=float), vector_count=0)


def givens_orthogonal(rng: np.random.Generator, n: int, rotations: int) -> np.ndarray:
    """Orthogonal matrix as a product of random Givens rotations."""
    Q = np.eye(n)
    for _ in range(rotations):
        i, j = rng.choice(n, size=2, replace=False)
        theta = rng.uniform(0, 2 * np.pi)
        c, s = np.cos(theta), np.sin(theta)
        G = np.eye(n)
        G[i, i] = c
        G[j, j] = c
        G[i, j] = s
        G[j, i] = -s
        Q = Q @ G
    return Q


class TestPowerIterConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            PowerIterConfig(max_iters=0)
        with pytest.raises(ValueError):
            PowerIterConfig(residual_tol=0.0)


class TestLeadingEigenvector:
    def test_diagonal_matrix(self):
        feature, lam = leading_eigenvector(cov(np.diag([4.0, 1.0])))
        assert lam == pytest.approx(4.0, abs=1e-9)
        np.testing.assert_allclose(feature.values, [1.0, 0.0], atol=1e-9)

    def test_2x2_closed_form(self):
        # (2-lam)^2 = 1 -> lam = 3, eigenvector [1, 1]/sqrt(2)
        feature, lam = leading_eigenvector(cov([[2.0, 1.0], [1.0, 2.0]]))
        assert lam == pytest.approx(3.0, abs=1e-9)
        np.testing.assert_allclose(feature.values, [1 / np.sqrt(2)] * 2, atol=1e-9)

    def test_matches_jacobi_on_random_spd(self, rng, fast_pi):
        for _ in range(10):
            R = random_spd(rng, 8)
            feature, lam = leading_eigenvector(R, fast_pi)
            oracle = jacobi_eigensystem(R)
            assert lam == pytest.approx(oracle.eigenvalues[0], rel=1e-6)
            np.testing.assert_allclose(
                feature.values, oracle.feature(0).values, atol=1e-6
            )

    def test_residual_bound_holds(self, rng, fast_pi):
        R = random_spd(rng, 12)
        feature, lam = leading_eigenvector(R, fast_pi)
        residual = np.linalg.norm(R.values @ feature.values - lam * feature.values)
        assert residual <= fast_pi.residual_tol * np.linalg.norm(R.values)

    def test_zero_matrix_returns_zero_eigenvalue(self):
        feature, lam = leading_eigenvector(cov(np.zeros((4, 4))))
        assert lam == 0.0
        assert feature.n == 4

    def test_no_convergence_raises_with_context(self, rng):
        # two clustered top eigenvalues force slow convergence
        Q = givens_orthogonal(rng, 6, 30)
        R = cov(Q @ np.diag([1.0, 0.999999, 0.1, 0.1, 0.1, 0.1]) @ Q.T)
        with pytest.raises(NoConvergenceError) as err:
            leading_eigenvector(R, PowerIterConfig(max_iters=5, residual_tol=1e-14))
        assert err.value.iterations == 10  # one reseeded restart doubles the budget
        assert err.value.residual > 0

    def test_deterministic_given_seed(self, rng, fast_pi):
        R = random_spd(rng, 8)
        f1, l1 = leading_eigenvector(R, fast_pi)
        f2, l2 = leading_eigenvector(R, fast_pi)
        assert l1 == l2
        assert np.array_equal(f1.values, f2.values)


class TestMinEigenvalue:
    def test_diagonal(self, fast_pi):
        assert min_eigenvalue(cov(np.diag([4.0, 1.0])), fast_pi) == pytest.approx(1.0, abs=1e-9)

    def test_isotropic_degenerate_spectrum(self, fast_pi):
        assert min_eigenvalue(cov(2.0 * np.eye(5)), fast_pi) == pytest.approx(2.0, abs=1e-9)

    def test_matches_jacobi_on_random_spd(self, rng, fast_pi):
        for _ in range(10):
            R = random_spd(rng, 8)
            oracle = jacobi_eigensystem(R)
            got = min_eigenvalue(R, fast_pi)
            assert abs(got - oracle.eigenvalues[-1]) <= 1e-6 * oracle.eigenvalues[0]

    def test_extreme_pair_ordering(self, rng, fast_pi):
        for _ in range(20):
            R = random_spd(rng, 6, jitter=0.5)
            lam_max, lam_min, feature = extreme_eigenvalues(R, fast_pi)
            assert lam_max / lam_min >= 1.0
            assert feature.n == 6

    def test_ratio_is_one_only_for_scaled_identity(self, fast_pi, rng):
        lam_max, lam_min, _ = extreme_eigenvalues(cov(3.0 * np.eye(8)), fast_pi)
        assert lam_max / lam_min == pytest.approx(1.0, abs=1e-9)
        R = random_spd(rng, 8)
        lam_max, lam_min, _ = extreme_eigenvalues(R, fast_pi)
        assert lam_max / lam_min > 1.0 + 1e-9


class TestJacobiEigensystem:
    def test_identity(self):
        es = jacobi_eigensystem(cov(np.eye(3)))
        np.testing.assert_allclose(es.eigenvalues, np.ones(3))
        np.testing.assert_allclose(es.eigenvectors @ es.eigenvectors.T, np.eye(3), atol=1e-9)

    def test_diagonal_axis_vectors(self):
        es = jacobi_eigensystem(cov(np.diag([3.0, 2.0, 1.0])))
        np.testing.assert_allclose(es.eigenvalues, [3.0, 2.0, 1.0])
        np.testing.assert_allclose(np.abs(es.eigenvectors), np.eye(3), atol=1e-12)

    def test_reconstruction_identity_random_symmetric(self, rng):
        # indefinite symmetric input: Phi Lambda Phi' = R to 1e-9 max-abs
        for _ in range(5):
            raw = rng.standard_normal((16, 16))
            R = cov(raw + raw.T)
            es = jacobi_eigensystem(R)
            rebuilt = es.eigenvectors @ np.diag(es.eigenvalues) @ es.eigenvectors.T
            assert np.max(np.abs(rebuilt - R.values)) <= 1e-9
            assert np.all(np.diff(es.eigenvalues) <= 0)

    def test_orthonormality(self, rng):
        es = jacobi_eigensystem(random_spd(rng, 20))
        gram = es.eigenvectors.T @ es.eigenvectors
        assert np.max(np.abs(gram - np.eye(20))) <= 1e-9

    def test_eigenpair_residuals(self, rng):
        R = random_spd(rng, 10)
        es = jacobi_eigensystem(R)
        for k in range(10):
            v = es.eigenvectors[:, k]
            res = np.linalg.norm(R.values @ v - es.eigenvalues[k] * v)
            assert res <= 1e-9 * np.linalg.norm(R.values)

    def test_dimension_cap(self):
        with pytest.raises(DimensionTooLargeError):
            jacobi_eigensystem(cov(np.eye(65)))

    def test_matches_numpy_eigh(self, rng):
        R = random_spd(rng, 24)
        es = jacobi_eigensystem(R)
        w = np.linalg.eigvalsh(R.values)[::-1]
        np.testing.assert_allclose(es.eigenvalues, w, rtol=1e-10, atol=1e-10)


class TestRotationInvariance:
    def test_leading_pair_transforms_with_q(self, rng, fast_pi):
        # solver property: eigenvalue invariant, eigenvector maps to Q phi
        for _ in range(5):
            R = random_spd(rng, 8)
            feature, lam = leading_eigenvector(R, fast_pi)
            Q = givens_orthogonal(rng, 8, 40)
            rotated = CovMatrix(values=Q @ R.values @ Q.T, vector_count=0)
            feature_r, lam_r = leading_eigenvector(rotated, fast_pi)
            assert lam_r == pytest.approx(lam, abs=1e-9 * max(1.0, lam))
            # compare directions after canonicalization, sign-insensitively
            assert abs(np.dot(feature_r.values, Q @ feature.values)) == pytest.approx(1.0, abs=1e-6)
