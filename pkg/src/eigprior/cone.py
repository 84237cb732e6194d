"""The convex cone of PSD matrices with prescribed leading eigenvectors.

Given an ordered orthonormal prior u_1..u_K, the cone holds every symmetric
PSD matrix whose K smallest-eigenvalue eigenvectors are exactly u_1..u_K in
that order. This module tests membership and projects a positive definite
matrix into the cone by a greedy residual-peeling construction on its
inverse: peel off one rank-1 component per step, prior directions first,
then data-driven completion directions, with peel coefficients forced to be
non-increasing so the prior directions end up carrying the largest
inverse-side (hence smallest Laplacian-side) eigenvalues.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass

import numpy as np

from .config import SolverConfig
from .linalg import as_sym, eig_sym, inverse_pd

ORTHONORMAL_TOL = 1e-10
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class EigenPrior:
    """Ordered orthonormal vectors u_1..u_K, one per row of ``vectors``."""

    vectors: np.ndarray
    tol: InitVar[float] = ORTHONORMAL_TOL

    def __post_init__(self, tol: float):
        v = np.atleast_2d(np.array(self.vectors, dtype=float, copy=True))
        if v.ndim != 2:
            raise ValueError(f"prior must be a (K, N) array, got shape {v.shape}")
        k, n = v.shape
        if not 1 <= k <= n:
            raise ValueError(f"need 1 <= K <= N, got K={k}, N={n}")
        if not np.all(np.isfinite(v)):
            raise ValueError("prior contains non-finite entries")
        gram_err = float(np.abs(v @ v.T - np.eye(k)).max())
        if gram_err > tol:
            raise ValueError(
                f"prior vectors are not orthonormal: max Gram error {gram_err:.3e} > {tol:.3e}"
            )
        object.__setattr__(self, "vectors", v)

    @property
    def k(self) -> int:
        return self.vectors.shape[0]

    @property
    def n(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class ConeProjection:
    """Result of projecting a PD matrix into the cone.

    projected
        The Laplacian-side output, an element of the cone.
    cov_approx
        Its exact inverse, the rank-1 reassembly of the peeled coefficients.
    coeffs
        Peel coefficients, non-increasing and strictly positive; these are
        the eigenvalues of ``cov_approx`` in basis order.
    completed_basis
        The N-K data-driven directions (rows) appended after the prior.
    """

    projected: np.ndarray
    cov_approx: np.ndarray
    coeffs: np.ndarray
    completed_basis: np.ndarray


def cone_contains(l_mat: np.ndarray, prior: EigenPrior, tol: float) -> bool:
    """Whether ``l_mat`` is PSD with u_k as its k-th ascending eigenvector.

    Each prior vector must be an invariant direction (residual
    ||L u - (u' L u) u|| <= tol) whose Rayleigh quotient matches the k-th
    ascending eigenvalue within tol; the residual form keeps the test well
    defined under eigenvalue ties.
    """
    m = as_sym(l_mat)
    if m.shape[0] != prior.n:
        raise ValueError(f"dimension mismatch: matrix {m.shape[0]}, prior {prior.n}")
    eigenvalues = eig_sym(m).eigenvalues
    if eigenvalues[0] < -tol:
        return False
    for k, u in enumerate(prior.vectors):
        rq = float(u @ m @ u)
        if float(np.linalg.norm(m @ u - rq * u)) > tol:
            return False
        if abs(rq - eigenvalues[k]) > tol:
            return False
    return True


def rank1_peel_prior(
    e_mat: np.ndarray, u: np.ndarray, mu_prev: float, floor: float
) -> tuple[float, np.ndarray]:
    """Peel the rank-1 component along a prior direction off a residual.

    The coefficient is the residual's energy along u, clamped into
    [floor, mu_prev] so the coefficient sequence stays non-increasing and
    strictly positive. Returns (coefficient, residual - coefficient * u u^T).
    """
    if not mu_prev > 0:
        raise ValueError(f"previous coefficient must be > 0, got {mu_prev}")
    mu = min(max(float(u @ e_mat @ u), floor), mu_prev)
    return mu, e_mat - mu * np.outer(u, u)


def _orthogonal_residual(x: np.ndarray, basis: np.ndarray) -> np.ndarray:
    # Two projection passes ("twice is enough"): one pass leaves O(eps/||r||)
    # contamination along the basis when x is nearly inside its span, which
    # compounds across peeling iterations.
    r = x - basis.T @ (basis @ x)
    return r - basis.T @ (basis @ r)


def max_aligned_unit(e: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Unit vector maximizing e'v subject to orthogonality to ``basis``.

    The relaxed problem (||v|| <= 1 instead of == 1) has the closed-form
    solution v = r / ||r|| with r the component of e orthogonal to the
    basis. When that residual is degenerate (e essentially inside the basis
    span), fall back to the first canonical basis vector whose orthogonal
    component survives, so the output is deterministic.
    """
    n = e.shape[0]
    basis = np.asarray(basis, dtype=float)
    if basis.size == 0:
        basis = np.zeros((0, n))
    basis = np.atleast_2d(basis)
    if basis.shape[0] >= n:
        raise ValueError("basis already spans the whole space")
    r = _orthogonal_residual(e, basis)
    nr = float(np.linalg.norm(r))
    if nr > DEGENERACY_TOL:
        return r / nr
    for i in range(n):
        cand = _orthogonal_residual(np.eye(n)[i], basis)
        nc = float(np.linalg.norm(cand))
        if nc > DEGENERACY_TOL:
            return cand / nc
    raise ValueError("no direction orthogonal to basis found")  # unreachable for K < N


def project_to_cone(
    p_mat: np.ndarray, prior: EigenPrior, cfg: SolverConfig | None = None
) -> ConeProjection:
    """Project a symmetric PD matrix into the cone defined by ``prior``.

    Works on the inverse C = P^{-1}. Step 1 peels the prior directions in
    order, each coefficient clamped by its predecessor. Step 2 completes
    the basis one direction at a time: take the top eigenvector of the
    current residual, orthogonalize it against everything used so far, peel
    with the same clamp. The reassembled inverse uses the reciprocal
    coefficients, so the non-increasing clamp makes the prior directions
    the smallest-eigenvalue eigenvectors of the output.

    Every peel coefficient equals the energy of C along its (unit)
    direction, which is at least lambda_min(C) > 0, so the floor
    ``cfg.mu_floor_ratio * mu_1`` only binds as a numerical safety net.

    Parameters
    ----------
    p_mat : (n, n) symmetric positive definite matrix.
    prior : EigenPrior with matching dimension.
    cfg : SolverConfig; only ``mu_floor_ratio`` is used here.

    Returns
    -------
    ConeProjection. ``projected`` satisfies
    ``cone_contains(projected, prior, 1e-6)`` and the operator is
    idempotent: projecting the output returns it unchanged.
    """
    if cfg is None:
        cfg = SolverConfig()
    p = as_sym(p_mat)
    n = p.shape[0]
    if prior.n != n:
        raise ValueError(f"dimension mismatch: matrix {n}, prior {prior.n}")

    c = inverse_pd(p)
    u1 = prior.vectors[0]
    mu1 = float(u1 @ c @ u1)
    if not mu1 > 0:
        raise ValueError(
            f"energy of the inverse along the first prior vector is {mu1}; input not PD?"
        )
    floor = cfg.mu_floor_ratio * mu1

    coeffs = np.empty(n)
    basis = np.empty((n, n))
    coeffs[0] = mu1
    basis[0] = u1
    residual = c - mu1 * np.outer(u1, u1)

    for t in range(1, prior.k):
        mu, residual = rank1_peel_prior(residual, prior.vectors[t], coeffs[t - 1], floor)
        coeffs[t] = mu
        basis[t] = prior.vectors[t]

    for t in range(prior.k, n):
        top = eig_sym(residual).eigenvectors[:, -1]
        v = max_aligned_unit(top, basis[:t])
        mu = min(max(float(v @ residual @ v), floor), coeffs[t - 1])
        coeffs[t] = mu
        basis[t] = v
        residual = residual - mu * np.outer(v, v)

    q = basis.T  # columns are the peel directions
    cov_approx = as_sym((q * coeffs) @ q.T)
    projected = as_sym((q * (1.0 / coeffs)) @ q.T)
    return ConeProjection(
        projected=projected,
        cov_approx=cov_approx,
        coeffs=coeffs,
        completed_basis=basis[prior.k :].copy(),
    )


def alignment_energy(c_mat: np.ndarray, u: np.ndarray) -> float:
    """Energy of a PD matrix along a unit direction, inner(C, u u^T).

    For positive definite C this equals ||u^T B||^2 of any factor C = B B^T
    and therefore cannot be negative; a materially negative value is
    reported as an error since it means C was not PD.
    """
    value = float(u @ c_mat @ u)
    if value < -1e-12:
        raise AssertionError(
            f"alignment energy {value} < -1e-12: matrix is not positive definite"
        )
    return value
