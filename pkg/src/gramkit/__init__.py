"""Cross Gram matrices of finite frames.

The cross Gram matrix of an operator ``U`` with respect to families ``Phi``
and ``Psi`` has entries ``<U psi_j, phi_i>``.  The package builds these
matrices, inverts and pseudo-inverts them through dual frames, compares
Schatten norms, and issues certificates for approximate duality and for
stability under perturbation.
"""
from .approx import (
    approx_dual_defect,
    corrected_dual,
    necessary_bound,
    right_inverse_condition,
    sufficient_conditions,
)
from .certificate import Certificate
from .exceptions import (
    ConvergenceError,
    DimensionError,
    FormatError,
    GramkitError,
    NonFiniteError,
    PreconditionError,
    TheoremViolation,
)
from .frames import (
    FrameClass,
    FrameKind,
    FrameSystem,
    analyze,
    canonical_dual,
    classify,
    dual_from_parameter,
    frame_bounds,
    frame_operator,
    is_dual_pair,
    synthesize,
)
from .gram import (
    CrossGram,
    adjoint,
    compose,
    cross_gram,
    gram_entrywise,
    gram_matrix,
    identity_gram_diagnosis,
    reconstruct_operator,
)
from .inversion import (
    gram_range_witness,
    image_frame_inverse,
    invert_gram,
    one_sided_diagnosis,
    pinv_gram,
    pinv_transported,
    pinv_via_tilde,
    range_condition,
    special_dual,
)
from .numeric import (
    DEFAULT_POLICY,
    RankAmbiguityWarning,
    SvdFactorization,
    TolerancePolicy,
    numeric_rank,
    operator_norm,
    pseudo_inverse,
    range_equal,
    svd,
)
from .schatten import mixed_norm, onb_pair_functional, schatten_gram_check, schatten_norm, truncation_decay
from .stability import (
    StabilityBudget,
    convergence_harness,
    joint_stability,
    neumann_inverse,
    perturb_certificates,
    riesz_perturbation,
    stability_factor,
    stability_three_ops,
)

__version__ = "0.1.0"
