"""Solver configuration shared by the GLASSO, projection and hybrid solvers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the estimation pipeline.

    rho
        l1 shrinkage weight of the penalized likelihood (must be > 0).
        The default is exp(-6) ~ 2.48e-3.
    tol
        Convergence tolerance: max entry change per sweep for the plain
        GLASSO solver, relative Frobenius change of the Laplacian iterate
        for the hybrid solver.
    max_outer
        Cap on sweeps (plain GLASSO) or alternation rounds (hybrid).
    max_sweeps_per_round
        Dual BCD sweeps run between consecutive cone projections. The
        default of 3 lets each round pull the covariance back inside the
        dual constraint box before the next projection; a single sweep
        tends to oscillate on near-singular empirical covariances.
    mu_floor_ratio
        Peel coefficients are clamped below at this fraction of the first
        coefficient so the reassembled covariance stays invertible.
    seed
        Base seed for any data generation driven by this config.
    """

    rho: float = math.exp(-6.0)
    tol: float = 1e-4
    max_outer: int = 200
    max_sweeps_per_round: int = 3
    mu_floor_ratio: float = 1e-8
    seed: int = field(default=0)

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError(f"rho must be > 0, got {self.rho}")
        if not 0 < self.tol < 1:
            raise ValueError(f"tol must be in (0, 1), got {self.tol}")
        if self.max_outer < 1:
            raise ValueError(f"max_outer must be >= 1, got {self.max_outer}")
        if self.max_sweeps_per_round < 1:
            raise ValueError(
                f"max_sweeps_per_round must be >= 1, got {self.max_sweeps_per_round}"
            )
        if not 0 < self.mu_floor_ratio < 1:
            raise ValueError(
                f"mu_floor_ratio must be in (0, 1), got {self.mu_floor_ratio}"
            )
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
