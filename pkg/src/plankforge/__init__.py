"""plankforge: weighted averaging schemes, plank coverage geometry, and
sign-combination experiments in finite-dimensional normed space models."""

from ._version import __version__
from .constructions import (
    BlockPartition,
    BoundCheck,
    ExponentPair,
    NormFamily,
    block_basis,
    block_distortion,
    block_partition,
    block_transform_bound,
    block_weights,
    parse_family,
    prefix_weights,
    scaled_basis_sequence,
)
from .cotype import (
    CotypeReport,
    HolderCheck,
    NecessaryReport,
    cotype_constant_estimate,
    cotype_ratio,
    holder_row_check,
    necessary_condition_check,
    pattern_from_index,
    signed_combination_norms,
    sup_functional_bound,
)
from .errors import (
    BoundViolationError,
    ConstructionImpossibleError,
    InsufficientDataError,
    InvalidInputError,
    NoCertificateError,
    PlankforgeError,
    PreconditionError,
    ResourceLimitError,
    SpaceMismatchError,
    SupportRangeError,
)
from .estimators import (
    RowAverageTransformer,
    SignPatternMaximizer,
    WitnessSearchEstimator,
)
from .planks import (
    CoverageReport,
    Cylinder,
    DemoReport,
    Plank,
    WitnessReport,
    budget_sums,
    counterexample_demo,
    coverage_mc,
    cylinder_contains,
    parallel_cover_decision,
    plank_contains,
    planks_from_sequence,
    separating_neighborhood,
    witness_search,
)
from .reports import canonical_csv, canonical_json, emit_report, render_report
from .seeding import derive_seed, rng_for, worker_count
from .spaces import (
    Functional,
    ProductVector,
    Rotation,
    Space,
    Vector,
    apply_rotation,
    dual_norm,
    euclidean,
    euclidean_complex,
    lp_space,
    norm,
    pair,
    product_pair_sq,
    random_functional,
    random_rotation,
    random_unit,
    read_vectors_csv,
    sup_space,
    write_vectors_csv,
)
from .summability import (
    ScalarSequence,
    TrendReport,
    ValidationReport,
    WeightMatrix,
    min_on_support,
    ordered_sum,
    transform_trend,
    transform_value,
    transform_values,
    validate_weights,
)

__all__ = [
    "__version__",
    "BlockPartition",
    "BoundCheck",
    "BoundViolationError",
    "ConstructionImpossibleError",
    "CotypeReport",
    "CoverageReport",
    "Cylinder",
    "DemoReport",
    "ExponentPair",
    "Functional",
    "HolderCheck",
    "InsufficientDataError",
    "InvalidInputError",
    "NecessaryReport",
    "NoCertificateError",
    "NormFamily",
    "Plank",
    "PlankforgeError",
    "PreconditionError",
    "ProductVector",
    "ResourceLimitError",
    "Rotation",
    "RowAverageTransformer",
    "ScalarSequence",
    "SignPatternMaximizer",
    "Space",
    "SpaceMismatchError",
    "SupportRangeError",
    "TrendReport",
    "ValidationReport",
    "Vector",
    "WeightMatrix",
    "WitnessSearchEstimator",
    "WitnessReport",
    "apply_rotation",
    "block_basis",
    "block_distortion",
    "block_partition",
    "block_transform_bound",
    "block_weights",
    "budget_sums",
    "canonical_csv",
    "canonical_json",
    "cotype_constant_estimate",
    "cotype_ratio",
    "counterexample_demo",
    "coverage_mc",
    "cylinder_contains",
    "derive_seed",
    "dual_norm",
    "emit_report",
    "euclidean",
    "euclidean_complex",
    "holder_row_check",
    "lp_space",
    "min_on_support",
    "necessary_condition_check",
    "pattern_from_index",
    "norm",
    "ordered_sum",
    "pair",
    "parallel_cover_decision",
    "parse_family",
    "plank_contains",
    "planks_from_sequence",
    "prefix_weights",
    "product_pair_sq",
    "random_functional",
    "random_rotation",
    "random_unit",
    "read_vectors_csv",
    "render_report",
    "rng_for",
    "scaled_basis_sequence",
    "separating_neighborhood",
    "signed_combination_norms",
    "sup_functional_bound",
    "sup_space",
    "transform_trend",
    "transform_value",
    "transform_values",
    "validate_weights",
    "witness_search",
    "worker_count",
    "write_vectors_csv",
]
