import numpy as np
import pytest

from eigprior.config import SolverConfig
from eigprior.cone import (
    EigenPrior,
    alignment_energy,
    cone_contains,
    max_aligned_unit,
    project_to_cone,
    rank1_peel_prior,
)
from eigprior.linalg import cholesky, eig_sym, inverse_pd

from conftest import cone_member, random_orthonormal, random_pd


def aligned_unit_oracle(e, basis, steps=200_000, step_tol=1e-10):
    """Projected gradient ascent for max e'v s.t. v orthogonal to basis, ||v|| <= 1."""
    basis = np.atleast_2d(basis)
    n = e.shape[0]
    v = np.zeros(n)
    lr = 0.5
    for _ in range(steps):
        w = v + lr * e
        w = w - basis.T @ (basis @ w)
        norm = np.linalg.norm(w)
        if norm > 1.0:
            w = w / norm
        if np.linalg.norm(w - v) <= step_tol:
            return w
        v = w
    return v


class TestEigenPrior:
    def test_accepts_orthonormal_rows(self, rng):
        p = EigenPrior(random_orthonormal(6, 3, rng))
        assert p.k == 3 and p.n == 6

    def test_rejects_non_orthonormal(self):
        with pytest.raises(ValueError, match="orthonormal"):
            EigenPrior(np.array([[1.0, 0.0], [1.0, 0.0]]))

    def test_rejects_bad_k(self):
        with pytest.raises(ValueError):
            EigenPrior(np.eye(3 + 1, 3))

    def test_single_vector_promoted_to_2d(self):
        p = EigenPrior(np.array([1.0, 0.0, 0.0]))
        assert p.vectors.shape == (1, 3)


class TestConeContains:
    def test_diagonal_member(self):
        prior = EigenPrior(np.eye(3)[:1])
        assert cone_contains(np.diag([1.0, 2.0, 3.0]), prior, 1e-10)

    def test_diagonal_non_member(self):
        # e1 pairs with the largest eigenvalue here, not the smallest.
        prior = EigenPrior(np.eye(3)[:1])
        assert not cone_contains(np.diag([3.0, 2.0, 1.0]), prior, 1e-10)

    def test_constructed_members(self, rng):
        for n, k in [(5, 1), (6, 2), (8, 3)]:
            m, prior_rows = cone_member(n, k, rng)
            assert cone_contains(m, EigenPrior(prior_rows), 1e-8)

    def test_rejects_negative_definite(self):
        prior = EigenPrior(np.eye(2)[:1])
        assert not cone_contains(np.diag([-1.0, 1.0]), prior, 1e-8)

    def test_tied_eigenvalues_use_invariant_subspace(self):
        # Identity has a fully degenerate spectrum; any unit vector qualifies.
        v = np.array([1.0, 1.0, 1.0]) / np.sqrt(3.0)
        assert cone_contains(np.eye(3), EigenPrior(v), 1e-10)


class TestRank1Peel:
    def test_below_previous_kept(self):
        e = np.diag([0.4, 0.0])
        mu, nxt = rank1_peel_prior(e, np.eye(2)[0], 1.0, 1e-8)
        assert mu == pytest.approx(0.4, abs=1e-15)
        np.testing.assert_allclose(nxt, np.diag([0.0, 0.0]), atol=1e-15)

    def test_clamped_to_previous(self):
        e = np.diag([1.7, 0.0])
        mu, _ = rank1_peel_prior(e, np.eye(2)[0], 1.0, 1e-8)
        assert mu == 1.0

    def test_clamped_to_floor(self):
        e = np.diag([-0.2, 0.0])
        u = np.eye(2)[0]
        mu, nxt = rank1_peel_prior(e, u, 1.0, 1e-8)
        assert mu == 1e-8
        np.testing.assert_allclose(nxt, e - mu * np.outer(u, u), atol=1e-18)

    def test_requires_positive_previous(self):
        with pytest.raises(ValueError):
            rank1_peel_prior(np.eye(2), np.eye(2)[0], 0.0, 1e-8)


class TestMaxAlignedUnit:
    def test_already_orthogonal(self):
        v = max_aligned_unit(np.eye(3)[0], np.eye(3)[1:2])
        np.testing.assert_allclose(v, np.eye(3)[0], atol=1e-14)

    def test_hand_projection(self):
        e = np.array([1.0, 1.0, 0.0]) / np.sqrt(2.0)
        v = max_aligned_unit(e, np.eye(3)[:1])
        np.testing.assert_allclose(v, np.eye(3)[1], atol=1e-14)

    def test_matches_projected_gradient_oracle(self, rng):
        for _ in range(20):
            n = 7
            basis = random_orthonormal(n, 3, rng)
            e = rng.standard_normal(n)
            e /= np.linalg.norm(e)
            v = max_aligned_unit(e, basis)
            oracle = aligned_unit_oracle(e, basis)
            assert e @ v >= e @ oracle - 1e-6
            assert np.abs(basis @ v).max() <= 1e-12
            assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)

    def test_degenerate_falls_back_deterministically(self):
        basis = np.eye(4)[:2]
        v1 = max_aligned_unit(np.array([1.0, 0.0, 0.0, 0.0]), basis)
        v2 = max_aligned_unit(np.array([0.0, 1.0, 0.0, 0.0]), basis)
        np.testing.assert_allclose(v1, np.eye(4)[2], atol=1e-14)
        np.testing.assert_allclose(v2, np.eye(4)[2], atol=1e-14)

    def test_full_basis_is_error(self):
        with pytest.raises(ValueError):
            max_aligned_unit(np.ones(2) / np.sqrt(2), np.eye(2))


class TestProjectToCone:
    def test_fixed_point_diag(self):
        # diag(1,2,3) with prior e1 is already in the cone.
        prior = EigenPrior(np.eye(3)[:1])
        res = project_to_cone(np.diag([1.0, 2.0, 3.0]), prior)
        np.testing.assert_allclose(res.projected, np.diag([1.0, 2.0, 3.0]), atol=1e-10)
        np.testing.assert_allclose(res.coeffs, [1.0, 0.5, 1.0 / 3.0], atol=1e-12)

    def test_hand_trace_diag_3_1(self):
        # C = diag(1/3, 1); mu1 = 1/3; completion peels e2 clamped to 1/3;
        # reassembled inverse is (1/3) I, so the projection is 3 I.
        prior = EigenPrior(np.eye(2)[:1])
        res = project_to_cone(np.diag([3.0, 1.0]), prior)
        np.testing.assert_allclose(res.projected, 3.0 * np.eye(2), atol=1e-10)
        np.testing.assert_allclose(res.cov_approx, np.eye(2) / 3.0, atol=1e-12)
        np.testing.assert_allclose(res.coeffs, [1.0 / 3.0, 1.0 / 3.0], atol=1e-12)

    def test_membership_and_idempotency_random(self, rng):
        cfg = SolverConfig()
        for trial in range(100):
            n = int(rng.integers(3, 9))
            k = int(rng.integers(1, min(4, n)))
            p = random_pd(n, rng)
            prior = EigenPrior(random_orthonormal(n, k, rng))
            res = project_to_cone(p, prior, cfg)
            assert cone_contains(res.projected, prior, 1e-6), f"trial {trial}"
            res2 = project_to_cone(res.projected, prior, cfg)
            rel = np.linalg.norm(res2.projected - res.projected) / np.linalg.norm(
                res.projected
            )
            assert rel <= 1e-8, f"trial {trial}: {rel}"

    def test_coeffs_non_increasing_positive(self, rng):
        for _ in range(20):
            p = random_pd(6, rng)
            prior = EigenPrior(random_orthonormal(6, 2, rng))
            res = project_to_cone(p, prior)
            assert np.all(np.diff(res.coeffs) <= 1e-15)
            assert np.all(res.coeffs > 0)

    def test_basis_completion_orthonormal(self, rng):
        p = random_pd(8, rng)
        prior = EigenPrior(random_orthonormal(8, 3, rng))
        res = project_to_cone(p, prior)
        full = np.vstack([prior.vectors, res.completed_basis])
        assert np.abs(full @ full.T - np.eye(8)).max() <= 1e-8

    def test_cov_approx_is_exact_inverse(self, rng):
        p = random_pd(5, rng)
        prior = EigenPrior(random_orthonormal(5, 2, rng))
        res = project_to_cone(p, prior)
        assert np.linalg.norm(res.projected @ res.cov_approx - np.eye(5)) <= 1e-8

    def test_fixed_point_for_members(self, rng):
        # Membership plus correctly ordered inverse energies means identity.
        m, prior_rows = cone_member(6, 2, rng)
        prior = EigenPrior(prior_rows)
        assert cone_contains(m, prior, 1e-10)
        res = project_to_cone(m, prior)
        assert np.linalg.norm(res.projected - m) / np.linalg.norm(m) <= 1e-8

    def test_rejects_non_pd(self):
        with pytest.raises(Exception):
            project_to_cone(np.diag([1.0, -1.0]), EigenPrior(np.eye(2)[:1]))

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(ValueError):
            project_to_cone(np.eye(3), EigenPrior(np.eye(2)[:1]))


class TestConvexCone:
    def test_positive_combinations_stay_members(self, rng):
        # Shared leading eigenvectors survive any positive combination.
        for trial in range(60):
            n, k = 6, int(rng.integers(1, 4))
            shared = random_orthonormal(n, n, rng)
            eig1 = np.cumsum(rng.uniform(0.1, 1.0, n))
            eig2 = np.cumsum(rng.uniform(0.1, 1.0, n))
            comp2 = np.vstack(
                [shared[:k], _rotate_complement(shared, k, rng)]
            )
            l1 = (shared.T * eig1) @ shared
            l2 = (comp2.T * eig2) @ comp2
            c1, c2 = rng.uniform(0.05, 2.0, size=2)
            if trial % 10 == 0:
                c1 = 0.0
            combo = c1 * l1 + c2 * l2
            prior = EigenPrior(shared[:k])
            assert cone_contains(0.5 * (combo + combo.T), prior, 1e-7)


def _rotate_complement(shared, k, rng):
    """Random orthonormal completion spanning the same complement subspace."""
    n = shared.shape[0]
    rot = np.linalg.qr(rng.standard_normal((n - k, n - k)))[0]
    return rot @ shared[k:]


class TestAlignmentEnergy:
    def test_identity(self, rng):
        u = rng.standard_normal(5)
        u /= np.linalg.norm(u)
        assert alignment_energy(np.eye(5), u) == pytest.approx(1.0, abs=1e-12)

    def test_diagonal(self):
        assert alignment_energy(np.diag([2.0, 5.0]), np.eye(2)[1]) == 5.0

    def test_equals_factor_row_norm(self, rng):
        # For C = B B', the energy along u is ||u' B||^2.
        for _ in range(50):
            c = random_pd(6, rng)
            b = cholesky(c)
            u = rng.standard_normal(6)
            u /= np.linalg.norm(u)
            assert alignment_energy(c, u) == pytest.approx(
                np.linalg.norm(u @ b) ** 2, abs=1e-10
            )

    def test_nonnegative_on_pd(self, rng):
        for _ in range(200):
            c = random_pd(5, rng, eig_low=0.01, eig_high=10.0)
            u = rng.standard_normal(5)
            u /= np.linalg.norm(u)
            assert alignment_energy(c, u) >= -1e-12
