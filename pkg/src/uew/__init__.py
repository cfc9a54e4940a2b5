"""Ultrafine entanglement witness toolkit for small bipartite systems."""

from .analysis import MINUS_INF, PlaneSample, SweepRow, alpha_sweep, plane_samples, threshold_scan
from .linalg import (
    DimensionMismatch,
    EigenPair,
    HermitianOperator,
    Ket,
    conditional_operator,
    eig_hermitian,
    expectation,
    max_eigenpair,
    tensor_product,
)
from .optimize import (
    AssumptionViolated,
    CaseLabel,
    EmptyFeasibleSet,
    OptimizationResult,
    OptimizerConfig,
    classify_case,
    compute_alpha0,
    grid_oracle_sup,
    rotated_bound_residual,
    sup_product_constrained,
    sup_product_unconstrained,
)
from .states import (
    DensityMatrix,
    Example31Config,
    NoisyStateFamily,
    ProductKet,
    build_example31,
    build_phi,
    build_povm,
    min_eig_partial_transpose,
    noisy_member,
    partial_transpose,
    random_product_batch,
    random_product_ket,
)
from .witness import (
    AlphaWitness,
    ConstraintSpec,
    HalfSpaceSide,
    UewPair,
    Verdict,
    VerdictLabel,
    Witness,
    build_few,
    build_minus_inf,
    build_v_alpha,
    combine_alpha,
    detect,
    halfspace_membership,
)

__version__ = "0.1.0"
