"""Dense symmetric-matrix primitives used by every solver module.

Matrices are plain float64 numpy arrays kept exactly symmetric: every
constructor-style entry point routes through :func:`as_sym`, which averages
``A`` with its transpose.

Randomness policy: all sampling goes through ``numpy.random.default_rng``
seeded with a ``SeedSequence``. Derived streams (per trial, per retry
attempt) use ``SeedSequence([seed, index...])`` via :func:`substream` /
:func:`derive_seed`, so any experiment is reproducible from a single
integer seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import ConvergenceError, NotPositiveDefiniteError

# A Cholesky pivot must exceed this fraction of the largest diagonal entry,
# the package-wide singularity policy.
PIVOT_FLOOR_RATIO = 1e-12


def as_sym(a, check_tol: float | None = None) -> np.ndarray:
    """Return a float64 symmetrized copy of a square matrix.

    With ``check_tol`` set, asymmetry beyond that absolute tolerance is an
    error instead of being silently averaged away.
    """
    m = np.array(a, dtype=float, copy=True)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 1:
        raise ValueError("matrix dimension must be >= 1")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    if check_tol is not None:
        skew = float(np.abs(m - m.T).max())
        if skew > check_tol:
            raise ValueError(
                f"matrix is not symmetric: max |A - A^T| = {skew:.3e} > {check_tol:.3e}"
            )
    return 0.5 * (m + m.T)


def inner(p: np.ndarray, q: np.ndarray) -> float:
    """Frobenius inner product sum_ij P_ij Q_ij."""
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape} vs {q.shape}")
    return float(np.sum(p * q))


@dataclass(frozen=True)
class EigenDecomp:
    """Eigenvalues ascending; column i of ``eigenvectors`` pairs with entry i."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def eig_sym(a) -> EigenDecomp:
    """Full eigendecomposition of a symmetric matrix.

    Eigenvalues come back ascending. Each eigenvector's sign is fixed so
    that its largest-magnitude entry is positive (ties broken by lowest
    index), making the decomposition deterministic for a fixed input.
    """
    m = as_sym(a)
    try:
        vals, vecs = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        off = float(np.abs(m - np.diag(m.diagonal())).max())
        raise ConvergenceError(
            f"eigendecomposition failed to converge: {exc}", residual=off
        ) from exc
    lead = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[lead, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return EigenDecomp(vals, vecs * signs)


def cholesky(a) -> np.ndarray:
    """Lower-triangular B with B B^T = A, for symmetric positive definite A.

    Raises :class:`NotPositiveDefiniteError` naming the first pivot that
    falls at or below ``PIVOT_FLOOR_RATIO * max(diag(A))``.
    """
    m = as_sym(a)
    floor = PIVOT_FLOOR_RATIO * max(float(m.diagonal().max()), 0.0)
    try:
        b = np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(_first_failing_pivot(m, floor)) from None
    bad = np.flatnonzero(b.diagonal() ** 2 <= floor)
    if bad.size:
        raise NotPositiveDefiniteError(int(bad[0]))
    return b


def _first_failing_pivot(m: np.ndarray, floor: float) -> int:
    # Textbook outer-product factorization, only run to locate the bad pivot.
    a = m.copy()
    n = a.shape[0]
    for k in range(n):
        if a[k, k] <= floor:
            return k
        a[k, k] = np.sqrt(a[k, k])
        a[k + 1 :, k] /= a[k, k]
        a[k + 1 :, k + 1 :] -= np.outer(a[k + 1 :, k], a[k + 1 :, k])
    return n - 1


def inverse_pd(a) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix, symmetrized."""
    b = cholesky(a)
    eye = np.eye(b.shape[0])
    z = solve_triangular(b, eye, lower=True, check_finite=False)
    inv = solve_triangular(b.T, z, lower=False, check_finite=False)
    return 0.5 * (inv + inv.T)


def sample_gaussian(cov, m: int, seed: int) -> np.ndarray:
    """Draw m zero-mean Gaussian vectors with the given covariance.

    Returns an (m, n) array; row i is sample i. Deterministic per
    (cov, m, seed): x = B z with B the Cholesky factor and z standard
    normal from the seeded generator.
    """
    if m < 1:
        raise ValueError(f"sample count must be >= 1, got {m}")
    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
    return sample_gaussian_rng(cov, m, rng)


def sample_gaussian_rng(cov, m: int, rng: np.random.Generator) -> np.ndarray:
    """Like :func:`sample_gaussian` but drawing from a caller-owned stream."""
    b = cholesky(cov)
    z = rng.standard_normal((m, b.shape[0]))
    return z @ b.T


def empirical_covariance(x) -> np.ndarray:
    """Mean-centered covariance (1/M) sum (x - xbar)(x - xbar)^T.

    Uses the 1/M maximum-likelihood normalization rather than 1/(M-1).
    """
    xm = np.asarray(x, dtype=float)
    if xm.ndim != 2:
        raise ValueError(f"expected an (M, N) array of row vectors, got shape {xm.shape}")
    if xm.shape[0] < 1:
        raise ValueError("empirical covariance needs at least one sample")
    centered = xm - xm.mean(axis=0)
    c = centered.T @ centered / xm.shape[0]
    return 0.5 * (c + c.T)


def substream(seed: int, *path: int) -> np.random.Generator:
    """Child generator for (seed, *path), the package's stream-splitting rule."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, path)]))


def derive_seed(seed: int, *path: int) -> int:
    """Integer seed derived from (seed, *path) with the same splitting rule."""
    return int(np.random.SeedSequence([int(seed), *map(int, path)]).generate_state(1)[0])
