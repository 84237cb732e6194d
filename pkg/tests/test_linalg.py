import numpy as np
import pytest

from eigprior.errors import NotPositiveDefiniteError
from eigprior.linalg import (
    as_sym,
    cholesky,
    derive_seed,
    eig_sym,
    empirical_covariance,
    inner,
    inverse_pd,
    sample_gaussian,
    substream,
)

from conftest import random_pd


class TestAsSym:
    def test_averages_asymmetry(self):
        m = as_sym([[1.0, 2.0], [4.0, 3.0]])
        assert np.array_equal(m, m.T)
        assert m[0, 1] == 3.0

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            as_sym(np.zeros((2, 3)))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            as_sym([[1.0, np.nan], [np.nan, 1.0]])

    def test_check_tol(self):
        with pytest.raises(ValueError, match="not symmetric"):
            as_sym([[1.0, 2.0], [2.1, 1.0]], check_tol=1e-9)


class TestInner:
    def test_identity_trace(self):
        assert inner(np.eye(3), np.eye(3)) == 3.0

    def test_hand_case(self):
        # Elementwise sum: 1*0 + 2*1 + 2*1 + 0*3 = 4
        p = np.array([[1.0, 2.0], [2.0, 0.0]])
        q = np.array([[0.0, 1.0], [1.0, 3.0]])
        assert inner(p, q) == pytest.approx(4.0, abs=1e-14)

    def test_norm_case_nonnegative(self, rng):
        p = as_sym(rng.standard_normal((5, 5)))
        assert inner(p, p) == pytest.approx(np.linalg.norm(p) ** 2, rel=1e-12)
        assert inner(p, p) >= 0.0

    def test_bilinear_symmetric(self, rng):
        p = as_sym(rng.standard_normal((4, 4)))
        q = as_sym(rng.standard_normal((4, 4)))
        r = as_sym(rng.standard_normal((4, 4)))
        assert inner(p, q) == pytest.approx(inner(q, p), rel=1e-12)
        assert inner(p + 2.0 * q, r) == pytest.approx(
            inner(p, r) + 2.0 * inner(q, r), rel=1e-10, abs=1e-12
        )

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            inner(np.eye(2), np.eye(3))


class TestEigSym:
    def test_diagonal(self):
        dec = eig_sym(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_allclose(dec.eigenvalues, [1.0, 2.0, 3.0], atol=1e-12)
        np.testing.assert_allclose(
            np.abs(dec.eigenvectors), np.eye(3)[:, [1, 2, 0]], atol=1e-12
        )

    def test_identity(self):
        dec = eig_sym(np.eye(4))
        np.testing.assert_allclose(dec.eigenvalues, np.ones(4), atol=1e-14)

    def test_2x2_hand_case(self):
        # Characteristic polynomial of [[2,1],[1,2]]: (2-x)^2 - 1 -> x in {1, 3}
        dec = eig_sym(np.array([[2.0, 1.0], [1.0, 2.0]]))
        np.testing.assert_allclose(dec.eigenvalues, [1.0, 3.0], atol=1e-12)
        s = 1.0 / np.sqrt(2.0)
        np.testing.assert_allclose(dec.eigenvectors[:, 0], [s, -s], atol=1e-12)
        np.testing.assert_allclose(dec.eigenvectors[:, 1], [s, s], atol=1e-12)

    def test_orthonormal_and_reconstructs(self, rng):
        a = as_sym(rng.standard_normal((8, 8)))
        dec = eig_sym(a)
        v = dec.eigenvectors
        assert np.abs(v.T @ v - np.eye(8)).max() <= 1e-10
        recon = (v * dec.eigenvalues) @ v.T
        assert np.linalg.norm(a - recon) / max(1.0, np.linalg.norm(a)) <= 1e-9

    def test_rayleigh_quotient_of_first_vector(self, rng):
        a = random_pd(6, rng)
        dec = eig_sym(a)
        v0 = dec.eigenvectors[:, 0]
        assert v0 @ a @ v0 == pytest.approx(dec.eigenvalues[0], abs=1e-9)

    def test_sign_canonicalization_deterministic(self, rng):
        a = as_sym(rng.standard_normal((7, 7)))
        d1 = eig_sym(a)
        d2 = eig_sym(a.copy())
        assert np.array_equal(d1.eigenvectors, d2.eigenvectors)
        for col in d1.eigenvectors.T:
            assert col[np.argmax(np.abs(col))] > 0


class TestCholesky:
    def test_identity(self):
        np.testing.assert_allclose(cholesky(np.eye(3)), np.eye(3), atol=1e-15)

    def test_diagonal(self):
        np.testing.assert_allclose(
            cholesky(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-15
        )

    def test_hand_case(self):
        # [[4,2],[2,5]] = [[2,0],[1,2]] [[2,1],[0,2]]
        np.testing.assert_allclose(
            cholesky(np.array([[4.0, 2.0], [2.0, 5.0]])),
            np.array([[2.0, 0.0], [1.0, 2.0]]),
            atol=1e-14,
        )

    def test_reconstruction(self, rng):
        for _ in range(20):
            a = random_pd(6, rng)
            b = cholesky(a)
            assert np.linalg.norm(b @ b.T - a) / np.linalg.norm(a) <= 1e-10

    def test_non_pd_names_pivot(self):
        with pytest.raises(NotPositiveDefiniteError) as err:
            cholesky(np.diag([1.0, 1.0, -2.0]))
        assert err.value.pivot == 2

    def test_indefinite_after_elimination(self):
        # PD check must use Schur pivots, not raw diagonal entries.
        m = np.array([[1.0, 2.0], [2.0, 1.0]])
        with pytest.raises(NotPositiveDefiniteError) as err:
            cholesky(m)
        assert err.value.pivot == 1


class TestInversePd:
    def test_identity(self):
        np.testing.assert_allclose(inverse_pd(np.eye(3)), np.eye(3), atol=1e-14)

    def test_diagonal(self):
        np.testing.assert_allclose(
            inverse_pd(np.diag([2.0, 4.0])), np.diag([0.5, 0.25]), atol=1e-14
        )

    def test_multiply_back(self, rng):
        for _ in range(20):
            a = random_pd(7, rng)
            inv = inverse_pd(a)
            assert np.linalg.norm(a @ inv - np.eye(7)) <= 1e-8 * 7
            assert np.array_equal(inv, inv.T)

    def test_non_pd(self):
        with pytest.raises(NotPositiveDefiniteError):
            inverse_pd(np.diag([1.0, 0.0]))


class TestSampleGaussian:
    def test_deterministic_per_seed(self):
        cov = np.array([[1.0, 0.3], [0.3, 2.0]])
        x1 = sample_gaussian(cov, 100, seed=9)
        x2 = sample_gaussian(cov, 100, seed=9)
        assert np.array_equal(x1, x2)
        assert not np.array_equal(x1, sample_gaussian(cov, 100, seed=10))

    def test_identity_covariance_large_sample(self):
        x = sample_gaussian(np.eye(2), 100_000, seed=1)
        c = empirical_covariance(x)
        assert np.abs(c - np.eye(2)).max() <= 0.05

    def test_correlated_covariance(self):
        cov = np.array([[1.0, 0.9], [0.9, 1.0]])
        x = sample_gaussian(cov, 100_000, seed=2)
        c = empirical_covariance(x)
        corr = c[0, 1] / np.sqrt(c[0, 0] * c[1, 1])
        assert corr == pytest.approx(0.9, abs=0.02)

    def test_rejects_bad_count(self):
        with pytest.raises(ValueError):
            sample_gaussian(np.eye(2), 0, seed=0)


class TestEmpiricalCovariance:
    def test_repeated_vector_is_zero(self):
        x = np.tile([1.0, 2.0, 3.0], (5, 1))
        np.testing.assert_allclose(empirical_covariance(x), np.zeros((3, 3)), atol=1e-15)

    def test_hand_case(self):
        # Mean 0; (1/2) * (x1 x1' + x2 x2') = [[1,0],[0,0]]
        x = np.array([[1.0, 0.0], [-1.0, 0.0]])
        np.testing.assert_allclose(
            empirical_covariance(x), [[1.0, 0.0], [0.0, 0.0]], atol=1e-15
        )

    def test_matches_double_loop_oracle(self, rng):
        x = rng.standard_normal((13, 4))
        mean = x.mean(axis=0)
        expected = np.zeros((4, 4))
        for row in x:
            d = row - mean
            expected += np.outer(d, d)
        expected /= x.shape[0]
        np.testing.assert_allclose(empirical_covariance(x), expected, atol=1e-12)

    def test_psd(self, rng):
        c = empirical_covariance(rng.standard_normal((6, 9)))
        assert np.linalg.eigvalsh(c).min() >= -1e-10

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            empirical_covariance(np.zeros((0, 3)))


class TestStreams:
    def test_substream_deterministic(self):
        a = substream(5, 1).standard_normal(4)
        b = substream(5, 1).standard_normal(4)
        c = substream(5, 2).standard_normal(4)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_derive_seed_stable(self):
        assert derive_seed(0, 7) == derive_seed(0, 7)
        assert derive_seed(0, 7) != derive_seed(0, 8)
