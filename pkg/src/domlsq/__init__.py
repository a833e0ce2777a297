"""Weighted least-squares approximation of functions on irregular bounded domains.

Pipeline: draw uniform anchor samples on the domain by rejection, build a
discretely orthonormal polynomial basis on them by QR factorization, sample
function evaluations from the induced concentration measure, and solve the
reweighted normal equations.  See the README for the command-line driver and
the kernel benchmark.
"""
from .bench import (
    RepetitionRecord,
    RunRecord,
    builtin_function,
    cv_error,
    emit_heatmap,
    run_pipeline_once,
    run_sweep,
)
from .config import ConfigError, ExperimentConfig, load_config
from .domains import (
    AcceptanceTooLow,
    Domain,
    RngStream,
    make_annulus,
    make_hypercube,
    make_mandelbrot,
    make_swiss_cheese,
    sample_uniform,
)
from .estimator import (
    LeastSquaresFit,
    SampleBudget,
    assemble_design,
    assemble_rhs,
    bernstein_rate,
    christoffel_sup_estimate,
    evaluate_fit,
    sample_budgets,
    solve_fit,
    truncate,
)
from .index_sets import (
    MultiIndexSet,
    hyperbolic_cross_set,
    is_downward_closed,
    total_degree_set,
)
from .kernels import backend_name
from .linalg import (
    ExactRankDeficiency,
    QrFactors,
    SingularTriangular,
    frobenius_orthogonality_error,
    householder_qr,
    numerical_rank,
    spectral_condition_number,
    triangular_inverse,
)
from .sampling import (
    DiscreteMeasure,
    InsufficientSupport,
    ZeroMass,
    build_sigma_tilde,
    draw_indices,
    draw_indices_without_replacement,
)
from .surrogate import (
    OrthogonalityLost,
    RankDeficient,
    SingularPivot,
    SurrogateBasis,
    ZeroRow,
    adapt,
    adapt_fast,
    build_adapted,
    build_basis,
    build_direct,
    christoffel_row_sums,
    evaluate_basis,
    evaluate_monomials,
)

__version__ = "0.1.0"
