"""Truncated Givens-rotation approximate diagonalization.

A short product of Givens rotations drives a symmetric matrix toward
diagonal form; the accumulated rotation product is then an orthonormal
approximation of the eigenbasis, cheap to apply because every factor is
sparse. Rotations are chosen greedily: each step annihilates the current
largest-magnitude off-diagonal entry (classical Jacobi selection), which
makes the construction deterministic and monotonically shrinks the
off-diagonal energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cone import EigenPrior
from .linalg import as_sym


@dataclass(frozen=True)
class GivensProduct:
    """Rotations (i, j, angle) with i < j and angle in (-pi/4, pi/4],
    plus the near-diagonal matrix they produce."""

    rotations: tuple[tuple[int, int, float], ...]
    lambda_hat: np.ndarray

    @property
    def n(self) -> int:
        return self.lambda_hat.shape[0]


def _rotation_params(a: np.ndarray, i: int, j: int) -> tuple[float, float, float]:
    # Annihilating rotation for entry (i, j); tan(theta) in (-1, 1].
    tau = (a[j, j] - a[i, i]) / (2.0 * a[i, j])
    sign = 1.0 if tau >= 0.0 else -1.0
    t = sign / (abs(tau) + math.sqrt(1.0 + tau * tau))
    c = 1.0 / math.sqrt(1.0 + t * t)
    return c, t * c, math.atan(t)


def _apply_two_sided(a: np.ndarray, i: int, j: int, c: float, s: float) -> None:
    # A <- G^T A G for the rotation with G[i,i]=G[j,j]=c, G[i,j]=s, G[j,i]=-s.
    col_i = a[:, i].copy()
    col_j = a[:, j].copy()
    a[:, i] = c * col_i - s * col_j
    a[:, j] = s * col_i + c * col_j
    row_i = a[i, :].copy()
    row_j = a[j, :].copy()
    a[i, :] = c * row_i - s * row_j
    a[j, :] = s * row_i + c * row_j


def greedy_givens_diagonalize(l_mat: np.ndarray, steps: int) -> GivensProduct:
    """Greedily annihilate the largest off-diagonal entry for ``steps`` rotations.

    Ties go to the lexicographically smallest (i, j). Stops early if the
    working matrix becomes exactly diagonal, so the returned rotation list
    may be shorter than ``steps``.
    """
    if steps < 0:
        raise ValueError(f"rotation count must be >= 0, got {steps}")
    a = as_sym(l_mat)
    n = a.shape[0]
    rotations = []
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    for _ in range(steps):
        magnitudes = np.where(upper, np.abs(a), -1.0)
        flat = int(np.argmax(magnitudes))
        i, j = divmod(flat, n)
        if a[i, j] == 0.0:
            break
        c, s, theta = _rotation_params(a, i, j)
        _apply_two_sided(a, i, j, c, s)
        a[i, j] = 0.0
        a[j, i] = 0.0
        rotations.append((i, j, theta))
    return GivensProduct(tuple(rotations), a)


def rotation_product(gp: GivensProduct) -> np.ndarray:
    """The orthogonal matrix T accumulating all rotation transposes.

    T maps the original matrix to ``lambda_hat`` via T A T^T, so T's rows
    are the approximate eigenvectors.
    """
    t = np.eye(gp.n)
    for i, j, theta in gp.rotations:
        c = math.cos(theta)
        s = math.sin(theta)
        row_i = t[i, :].copy()
        row_j = t[j, :].copy()
        t[i, :] = c * row_i - s * row_j
        t[j, :] = s * row_i + c * row_j
    return t


def apply_rotations(gp: GivensProduct, a: np.ndarray) -> np.ndarray:
    """Replay the stored rotations on a matrix (two-sided), without forcing zeros."""
    out = as_sym(a)
    for i, j, theta in gp.rotations:
        _apply_two_sided(out, i, j, math.cos(theta), math.sin(theta))
    return out


def approximate_eigenvectors(gp: GivensProduct, k: int) -> EigenPrior:
    """First k approximate eigenvectors, ordered by ascending near-diagonal.

    Rows of the rotation product are reordered by the corresponding
    diagonal entries of ``lambda_hat`` (stable sort), so index 0 pairs with
    the smallest approximate eigenvalue.
    """
    if not 1 <= k <= gp.n:
        raise ValueError(f"need 1 <= k <= {gp.n}, got {k}")
    order = np.argsort(gp.lambda_hat.diagonal(), kind="stable")
    return EigenPrior(rotation_product(gp)[order[:k]])
