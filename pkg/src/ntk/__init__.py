"""Sparse-signal recovery toolkit.

Natural-thresholding solvers with concave binary regularization, the
classic greedy/thresholding baselines, brute-force correctness oracles,
and a reproducible Monte-Carlo benchmark harness.
"""

from .baselines import (recover_cosamp, recover_htp, recover_iht,
                        recover_omp, recover_sp)
from .errors import ContractViolationError, EnumerationBudgetError
from .harness import (ALGORITHMS, SweepResult, SweepRow, TrialRecord,
                      load_report, render_report, render_svg, run_trial,
                      runtime_sweep, success_sweep, trial_seed)
from .linalg import (lambda_max_sym, least_squares_on_support, mat_t_vec,
                     mat_vec, read_ntkm, write_ntkm)
from .model import (ProblemInstance, SensingMatrix, SparseSignal,
                    gen_gaussian_matrix, gen_instance, gen_sparse_signal,
                    normalize_columns)
from .oracles import (OracleResult, RicEstimate, brute_force_binary_ot,
                      brute_force_lp_min, estimate_ric, exhaustive_ric,
                      finite_diff_grad, grid_min_g_alpha)
from .regularizers import (ObjectiveEval, Regularizer, alpha_star,
                           eval_g_alpha, phi_gradient, phi_hessian_diag,
                           phi_value, tau)
from .solvers import (AlphaPolicy, ConvergedReason, IterateState,
                      RecoveryResult, SolverConfig, gradient_step,
                      nt_inner_loop, recover_nt, recover_ntp)
from .thresholding import (ThresholdResult, bottom_k_indices, hard_threshold,
                           top_k_indices)

__all__ = [
    "ALGORITHMS",
    "AlphaPolicy",
    "ContractViolationError",
    "ConvergedReason",
    "EnumerationBudgetError",
    "IterateState",
    "ObjectiveEval",
    "OracleResult",
    "ProblemInstance",
    "RecoveryResult",
    "Regularizer",
    "RicEstimate",
    "SensingMatrix",
    "SolverConfig",
    "SparseSignal",
    "SweepResult",
    "SweepRow",
    "ThresholdResult",
    "TrialRecord",
    "alpha_star",
    "bottom_k_indices",
    "brute_force_binary_ot",
    "brute_force_lp_min",
    "estimate_ric",
    "eval_g_alpha",
    "exhaustive_ric",
    "finite_diff_grad",
    "gen_gaussian_matrix",
    "gen_instance",
    "gen_sparse_signal",
    "gradient_step",
    "grid_min_g_alpha",
    "hard_threshold",
    "lambda_max_sym",
    "least_squares_on_support",
    "load_report",
    "mat_t_vec",
    "mat_vec",
    "normalize_columns",
    "nt_inner_loop",
    "phi_gradient",
    "phi_hessian_diag",
    "phi_value",
    "read_ntkm",
    "recover_cosamp",
    "recover_htp",
    "recover_iht",
    "recover_nt",
    "recover_ntp",
    "recover_omp",
    "recover_sp",
    "render_report",
    "render_svg",
    "run_trial",
    "runtime_sweep",
    "success_sweep",
    "tau",
    "top_k_indices",
    "trial_seed",
    "write_ntkm",
]
