"""Graph Laplacian learning from covariance with fixed leading eigenvectors.

The package couples a penalized inverse-covariance solver (dual block
coordinate descent) with a projection onto the convex cone of PSD matrices
whose first K eigenvectors equal a user-supplied orthonormal prior, plus
the synthetic-benchmark pipeline and graph-comparison metrics around it.
"""

from .config import SolverConfig
from .cone import (
    ConeProjection,
    EigenPrior,
    alignment_energy,
    cone_contains,
    max_aligned_unit,
    project_to_cone,
    rank1_peel_prior,
)
from .errors import (
    ConvergenceError,
    FormatError,
    NotPositiveDefiniteError,
    NumericalError,
)
from .estimator import EstimateReport, constrained_objective, proj_lasso
from .fgft import (
    GivensProduct,
    approximate_eigenvectors,
    apply_rotations,
    greedy_givens_diagonalize,
    rotation_product,
)
from .glasso import (
    GlassoResult,
    GlassoState,
    bcd_sweep,
    box_qp_row,
    dual_gap,
    glasso_objective,
    solve_glasso,
)
from .linalg import (
    EigenDecomp,
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
from .metrics import (
    MetricTriple,
    compare_laplacians,
    deltacon,
    lambda_distance,
    laplacian_to_adjacency,
    relative_error,
)
from .synthetic import GraphSpec, GroundTruth, assemble_generalized_laplacian, generate

__version__ = "0.1.0"
