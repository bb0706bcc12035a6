"""Upper bounds on inner-product expressions: evaluation, verification, tuning.

The package evaluates a catalog of Bessel / Boas-Bellman type inequalities as
pure functions of coefficient magnitudes and Gram matrices, verifies them over
seeded random instances, optimizes their conjugate-exponent parameters, and
ranks them empirically by tightness.
"""

from .space import (
    DEFAULT_PSD_TOL,
    ORACLE_REL_TOL,
    GramMatrix,
    ProblemInstance,
    RankDeficiencyError,
    ValidationError,
    VectorFamily,
    combination_norm_sq,
    gram_of_family,
    inner_product,
    instance_from_jsonable,
    instance_to_jsonable,
    load_instance,
    orthonormalize,
    save_instance,
    validate_instance,
)
from .variants import (
    DEFAULT_EXPONENTS,
    EXPONENT_MAX,
    MAX,
    SUM,
    Selector,
    Variant,
    VariantError,
    conjugate_exponent,
    full_catalog,
    holder,
    parse_variant,
    parse_variant_list,
)
from .bounds import (
    DEFAULT_POLICY,
    ORTHONORMAL_GATE_TOL,
    BoundEvaluation,
    IncompatibleInstanceError,
    TolerancePolicy,
    coarse_bound,
    cor23_bounds,
    diag_term,
    evaluate_variant,
    fourier_bound,
    lemma21_bound,
    offdiag_term,
    remark4_quantities,
    special_bound,
    weighted_sum_bound,
)
from .verify import (
    GenConfig,
    RemarkWitness,
    SearchBudgetError,
    SuiteReport,
    VerificationResult,
    check_variant,
    generate_instance,
    remark_comparison_rows,
    run_suite,
    search_incomparability,
)
from .tuning import (
    DEFAULT_INTERVAL,
    PROFILE_FAMILIES,
    ExponentProfile,
    RankEntry,
    TightnessRanking,
    optimize_exponent,
    profile_exponent,
    rank_variants,
)

__version__ = "0.1.0"
