"""Sparse recovery with the DCEN regularizer.

DCEN blends the l1 - alpha*l2 sparsity surrogate with a ridge term,

    r(x) = gamma*(||x||_1 - alpha*||x||_2) + (1 - gamma)*||x||_2^2,

and this package provides everything needed to use it: the closed-form
proximal operator, two solvers for (1/2)||Ax - b||^2 + lam*r(x) (outer
linearization with an ADMM subproblem, and a direct ADMM splitting), a
TV-regularized image reconstructor for undersampled frequency data,
recovery-condition calculators, deterministic data generators, a benchmark
harness, and the ``dcen`` command-line tool.
"""

from .admm import AdmmState, solve_admm
from .bench import (
    MatrixKind,
    SelectionSummary,
    TrialStats,
    reconstruction_snr,
    relative_error,
    run_noise_sweep,
    run_success_sweep,
    run_variable_selection,
)
from .core import (
    DcenParams,
    NumericalFailure,
    Problem,
    SolveReport,
    Termination,
    ZeroIterate,
    concave_gradient,
    eval_dc_parts,
    eval_objective,
    eval_regularizer,
    strong_convexity_modulus,
)
from .datagen import (
    RngSeed,
    SparseSignalSpec,
    ValueDist,
    add_awgn,
    gen_correlated_design,
    gen_dct_matrix,
    gen_gaussian_matrix,
    gen_sparse_signal,
    radial_mask,
    shepp_logan,
    warm_start,
)
from .dca import DcaState, InnerAdmmState, check_admm_stop, solve_dca, solve_subproblem_admm
from .estimator import DcenRegressor
from .linalg import LinearSolveCache, SolveMode, StaleCacheError, admm_x_update, smw_apply
from .prox import ProxCase, ProxTag, prox_dcen, prox_objective, prox_objective_gap, soft_threshold
from .theory import (
    RecoveryConstants,
    a_factor,
    bound_l1_minus_al2,
    condition_report,
    harmonic_sum,
    nsp_kappa,
    rip_delta_lower_bound,
    rip_exact_recovery_check,
    stability_constant,
    zero_not_stationary,
)
from .tv import (
    BregmanState,
    Image2D,
    KSpaceData,
    gradient_direction,
    make_kspace,
    reconstruct_dcen_tv,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # core
    "DcenParams", "Problem", "SolveReport", "Termination",
    "ZeroIterate", "NumericalFailure",
    "eval_regularizer", "eval_objective", "eval_dc_parts",
    "concave_gradient", "strong_convexity_modulus",
    # prox
    "ProxTag", "ProxCase", "soft_threshold", "prox_dcen",
    "prox_objective", "prox_objective_gap",
    # solvers
    "DcaState", "InnerAdmmState", "solve_dca", "solve_subproblem_admm",
    "check_admm_stop", "AdmmState", "solve_admm",
    "LinearSolveCache", "SolveMode", "StaleCacheError",
    "smw_apply", "admm_x_update",
    # estimator
    "DcenRegressor",
    # theory
    "RecoveryConstants", "harmonic_sum", "bound_l1_minus_al2", "a_factor",
    "rip_exact_recovery_check", "stability_constant", "nsp_kappa",
    "zero_not_stationary", "rip_delta_lower_bound", "condition_report",
    # tv
    "Image2D", "KSpaceData", "BregmanState", "gradient_direction",
    "make_kspace", "reconstruct_dcen_tv",
    # datagen
    "RngSeed", "ValueDist", "SparseSignalSpec", "gen_dct_matrix",
    "gen_gaussian_matrix", "gen_sparse_signal", "add_awgn", "shepp_logan",
    "radial_mask", "gen_correlated_design", "warm_start",
    # bench
    "MatrixKind", "TrialStats", "SelectionSummary", "relative_error",
    "reconstruction_snr", "run_success_sweep", "run_noise_sweep",
    "run_variable_selection",
]
