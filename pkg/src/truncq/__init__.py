"""Truncated q-norm recovery of sparse vectors and low-rank matrices,
with the associated restricted-isometry and approximation-property
analysis machinery."""

from .core import (
    CONE_TOL,
    DantzigSelector,
    LpBall,
    NoiseConstraint,
    NormTriple,
    TruncationSet,
    best_k_support,
    cone_constraint_holds,
    qnorm,
    restrict,
    sigma_k,
)
from .errors import (
    BetaOutOfRange,
    CombinatorialBlowup,
    DeltaOutOfRange,
    Infeasible,
    InvalidInput,
    NumericalFailure,
    TrivialNullSpace,
    TruncqError,
    Unsupported,
    WhichMismatch,
)
from .solvers_vector import (
    FirstJump,
    SolverConfig,
    SolverReport,
    TopJ,
    isd_recover,
    solve_truncated_l1,
    solve_truncated_lq,
)
from .solvers_matrix import (
    LinearMatrixMap,
    MatrixSolverReport,
    apply_adjoint,
    apply_map,
    schatten_qnorm,
    solve_truncated_schatten,
    truncated_sv_shrink,
)
from .analysis import (
    BoundReport,
    BoundVariant,
    Certified,
    ConstraintForm,
    PassedSampling,
    RipEstimate,
    RipOrder,
    SearchBudget,
    TsapReport,
    Violated,
    bound_theorem23,
    bound_theorem35,
    bound_theorem36,
    iff_condition_check,
    nsp_check,
    rip_constant,
    rip_constant_map,
    rip_lower_from_tsap,
    tsap_check,
    tsap_constants_from_rip,
)
from .harness import (
    Bernoulli,
    ExperimentKind,
    ExperimentReport,
    ExperimentSpec,
    Flat,
    FromFile,
    Gaussian,
    Power,
    add_noise,
    gaussian_matrix,
    run_experiment,
    sparse_signal,
)

__version__ = "0.1.0"
