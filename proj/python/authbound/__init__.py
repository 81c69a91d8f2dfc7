"""Optimal channel-forging attacks against estimate-comparison authentication,
and the error-region bounds they induce."""

from authbound._core import (
    AttackParameters,
    AttackSolution,
    AttackStrategy,
    JointChannelCovariance,
    NumericalError,
    PerturbationReport,
    PreconditionError,
    StructuralError,
    __version__,
    assemble_joint,
    assemble_xv,
    beta_lower_bound,
    binary_divergence,
    brute_force_scalar,
    build_identity_scenario,
    check_zero_block_inverse,
    cost_J,
    derive_seed,
    divergence_D,
    extract_strategy,
    finite_difference_gradient,
    is_feasible,
    iterate_fixed_point,
    kl_gaussian,
    perturb_and_check,
    project_to_feasible,
    region_boundary,
    sample_wishart_scenario,
    schur_A,
    schur_B,
    solve,
    solve_relaxed,
    stationarity_residual,
    validate,
)

__all__ = [
    "AttackParameters",
    "AttackSolution",
    "AttackStrategy",
    "JointChannelCovariance",
    "NumericalError",
    "PerturbationReport",
    "PreconditionError",
    "StructuralError",
    "__version__",
    "assemble_joint",
    "assemble_xv",
    "beta_lower_bound",
    "binary_divergence",
    "brute_force_scalar",
    "build_identity_scenario",
    "check_zero_block_inverse",
    "cost_J",
    "derive_seed",
    "divergence_D",
    "extract_strategy",
    "finite_difference_gradient",
    "is_feasible",
    "iterate_fixed_point",
    "kl_gaussian",
    "perturb_and_check",
    "project_to_feasible",
    "region_boundary",
    "sample_wishart_scenario",
    "schur_A",
    "schur_B",
    "solve",
    "solve_relaxed",
    "stationarity_residual",
    "validate",
]
