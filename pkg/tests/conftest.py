import numpy as np
import pytest


def random_orthonormal(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """k orthonormal rows of length n with deterministic signs."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.where(r.diagonal() == 0, 1.0, r.diagonal()))
    return q[:, :k].T


def random_pd(n: int, rng: np.random.Generator, eig_low=0.5, eig_high=5.0) -> np.ndarray:
    """Random PD matrix with spectrum uniform in [eig_low, eig_high]."""
    basis = random_orthonormal(n, n, rng).T
    eigenvalues = rng.uniform(eig_low, eig_high, size=n)
    m = (basis * eigenvalues) @ basis.T
    return 0.5 * (m + m.T)


def cone_member(n: int, k: int, rng: np.random.Generator, gap=0.1):
    """(matrix, prior_rows) with the prior as the k smallest-eigenvalue eigenvectors.

    Eigenvalue gaps are at least ``gap`` so membership is numerically
    unambiguous.
    """
    basis = random_orthonormal(n, n, rng).T
    eigenvalues = np.cumsum(rng.uniform(gap, 1.0, size=n)) + 0.1
    m = (basis * eigenvalues) @ basis.T
    return 0.5 * (m + m.T), basis[:, :k].T


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
