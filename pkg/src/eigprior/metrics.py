"""Graph-comparison metrics: relative error, DeltaCon similarity, spectra distance.

DeltaCon conventions for signed weighted graphs: the degree term in the
affinity system uses absolute weights, the coupling strength is
eps = 1/(1 + max_i D_ii) per graph, and affinities are clamped at zero
before the root-Euclidean distance. Those choices are fixed here and echoed
in CLI output metadata.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_sym, inverse_pd

#: Conventions baked into :func:`deltacon`, reported alongside results.
DELTACON_CONVENTIONS = {
    "epsilon": "1 / (1 + max absolute-weight degree), per graph",
    "degree": "sum of absolute weights",
    "distance": "root-Euclidean on affinities clamped at 0",
}


@dataclass(frozen=True)
class MetricTriple:
    re: float
    deltacon: float
    lambda_dist: float


def relative_error(truth: np.ndarray, learned: np.ndarray) -> float:
    """Relative Frobenius error ||truth - learned||_F / ||truth||_F."""
    if truth.shape != learned.shape:
        raise ValueError(f"dimension mismatch: {truth.shape} vs {learned.shape}")
    denom = float(np.linalg.norm(truth))
    if denom == 0.0:
        raise ValueError("relative error is undefined for a zero reference matrix")
    return float(np.linalg.norm(truth - learned)) / denom


def lambda_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Euclidean distance between the ascending-sorted spectra of a and b."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(np.linalg.eigvalsh(as_sym(a)) - np.linalg.eigvalsh(as_sym(b))))


def laplacian_to_adjacency(l_mat: np.ndarray) -> np.ndarray:
    """Off-diagonal adjacency read-out W_ij = -L_ij, zero diagonal."""
    w = -as_sym(l_mat)
    np.fill_diagonal(w, 0.0)
    return w


def _affinity(adj: np.ndarray) -> np.ndarray:
    degrees = np.abs(adj).sum(axis=1)
    eps = 1.0 / (1.0 + float(degrees.max()))
    system = np.eye(adj.shape[0]) + eps**2 * np.diag(degrees) - eps * adj
    return inverse_pd(system)


def deltacon(a_adj: np.ndarray, b_adj: np.ndarray) -> float:
    """Node-affinity similarity in (0, 1]; 1 means identical graphs.

    Computes each graph's pairwise affinity matrix S = (I + eps^2 D - eps A)^{-1},
    then 1 / (1 + d) with d the root-Euclidean distance between the two
    affinity matrices.
    """
    a = as_sym(a_adj)
    b = as_sym(b_adj)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    sa = np.sqrt(np.clip(_affinity(a), 0.0, None))
    sb = np.sqrt(np.clip(_affinity(b), 0.0, None))
    return 1.0 / (1.0 + float(np.linalg.norm(sa - sb)))


def compare_laplacians(truth: np.ndarray, learned: np.ndarray) -> MetricTriple:
    """All three metrics between a reference and a learned Laplacian."""
    return MetricTriple(
        re=relative_error(truth, learned),
        deltacon=deltacon(laplacian_to_adjacency(truth), laplacian_to_adjacency(learned)),
        lambda_dist=lambda_distance(truth, learned),
    )
