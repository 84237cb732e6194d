"""Synthetic ground-truth graphs and signals for benchmarking.

Pipeline per trial: scatter n nodes uniformly in the unit square, draw
Erdos-Renyi edge coins, weight surviving edges with a Gaussian kernel of
the Euclidean distance, drop weights below a threshold, flip each weight's
sign with probability flip_prob, assemble the Laplacian, invert
(L + eps*I) for the model covariance, and sample Gaussian signals from it.

The ground-truth Laplacian uses degrees computed from the unsigned
(pre-flip) weights, D_ii = sum_j |W_ij|, which keeps it diagonally dominant
and hence PSD for any sign pattern; with signed row sums a single negative
edge of weight w already forces an eigenvalue <= -2w and (L + eps*I) would
almost never be invertible as a covariance.

Draw order is pinned for reproducibility: positions, then one edge coin per
pair (row-major i < j), then one sign-flip coin per pair in the same order,
then the signal normals. Attempt a of a generation uses the derived stream
SeedSequence([seed, a]); an attempt whose (L + eps*I) is not positive
definite is discarded and the next attempt stream is tried.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefiniteError, NumericalError
from .linalg import (
    as_sym,
    cholesky,
    empirical_covariance,
    inverse_pd,
    substream,
)

MAX_GENERATION_ATTEMPTS = 100


@dataclass(frozen=True)
class GraphSpec:
    """Parameters of the synthetic-graph protocol (defaults: 20 nodes, 20 signals)."""

    n: int = 20
    er_prob: float = 0.6
    sigma: float = 0.5
    weight_threshold: float = 0.75
    flip_prob: float = 0.5
    diag_eps: float = 0.5
    m_signals: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if not 0.0 <= self.er_prob <= 1.0:
            raise ValueError(f"er_prob must be in [0, 1], got {self.er_prob}")
        if not 0.0 <= self.flip_prob <= 1.0:
            raise ValueError(f"flip_prob must be in [0, 1], got {self.flip_prob}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if not self.diag_eps > 0:
            raise ValueError(f"diag_eps must be > 0, got {self.diag_eps}")
        if self.m_signals < 1:
            raise ValueError(f"m_signals must be >= 1, got {self.m_signals}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")


@dataclass(frozen=True)
class GroundTruth:
    """Everything a benchmark trial needs, all derived from one seed."""

    positions: np.ndarray
    adjacency: np.ndarray
    laplacian: np.ndarray
    covariance: np.ndarray
    signals: np.ndarray
    empirical_cov: np.ndarray


def assemble_generalized_laplacian(w) -> np.ndarray:
    """D - W + diag(W) with D_ii the signed full row sum of W."""
    w = as_sym(w)
    d = np.diag(w.sum(axis=1))
    return d - w + np.diag(w.diagonal())


def signed_graph_laplacian(w) -> np.ndarray:
    """D - W with absolute-weight degrees D_ii = sum_j |W_ij|.

    Diagonally dominant with a nonnegative diagonal, hence PSD for any edge
    signs; coincides with the combinatorial Laplacian when all weights are
    nonnegative. This is the ground-truth construction used by
    :func:`generate`.
    """
    w = as_sym(w)
    return np.diag(np.abs(w).sum(axis=1)) - w


def generate(spec: GraphSpec) -> GroundTruth:
    """Generate one ground truth (graph, covariance, signals) from the spec.

    Sign flips can make L + eps*I indefinite; such attempts are discarded
    and regenerated from the next derived sub-seed, up to
    ``MAX_GENERATION_ATTEMPTS``.
    """
    n = spec.n
    rows, cols = np.triu_indices(n, k=1)
    for attempt in range(MAX_GENERATION_ATTEMPTS):
        rng = substream(spec.seed, attempt)
        positions = rng.random((n, 2))
        edge_coins = rng.random(rows.shape[0])
        flip_coins = rng.random(rows.shape[0])

        d2 = ((positions[rows] - positions[cols]) ** 2).sum(axis=1)
        weights = np.exp(-d2 / (2.0 * spec.sigma**2))
        keep = (edge_coins < spec.er_prob) & (weights >= spec.weight_threshold)
        signs = np.where(flip_coins < spec.flip_prob, -1.0, 1.0)
        values = np.where(keep, signs * weights, 0.0)

        adjacency = np.zeros((n, n))
        adjacency[rows, cols] = values
        adjacency += adjacency.T
        laplacian = signed_graph_laplacian(adjacency)

        try:
            covariance = inverse_pd(laplacian + spec.diag_eps * np.eye(n))
            factor = cholesky(covariance)
        except NotPositiveDefiniteError:
            continue
        z = rng.standard_normal((spec.m_signals, n))
        signals = z @ factor.T
        return GroundTruth(
            positions=positions,
            adjacency=adjacency,
            laplacian=laplacian,
            covariance=covariance,
            signals=signals,
            empirical_cov=empirical_covariance(signals),
        )
    raise NumericalError(
        f"no positive definite (L + {spec.diag_eps}*I) found in "
        f"{MAX_GENERATION_ATTEMPTS} attempts for seed {spec.seed}"
    )
