"""Exact Gevrey-series solutions and irregularity data for hypergeometric
systems of affine monomial curves."""

from .curves import (
    BetaClass,
    BetaClassification,
    CurveError,
    CurveKind,
    CurveMatrix,
    DeltaExponent,
    GcdNotOneError,
    LatticeBasis,
    NotIncreasingError,
    SemigroupTable,
    TooShortError,
    beta_class,
    delta_exponents,
    frobenius_number,
    isomorphic_parameters,
    lattice_ball,
    lattice_basis,
    lattice_decompose,
    make_curve,
    semigroup_gaps,
    semigroup_member,
    semigroup_table,
)
from .exponents import (
    ExponentVector,
    StandardPair,
    WeightVector,
    generic_exponents,
    initial_ideal_generators,
    polynomial_exponent_index,
    singular_exponents,
    standard_pairs,
    standard_weight,
)
from .irregularity import (
    BasisMember,
    DimensionAnswer,
    PointClass,
    SheafKind,
    SheafTag,
    stratum_dimension_table,
    dimension_table_diff,
    reference_dimension_table,
    gevrey_index_estimate,
    gevrey_rescale,
    irregularity_dimension,
    monodromy_rotations,
    slope,
    slope_subseries,
    solution_basis,
    verify_basis,
)
from .restriction import (
    BFunction,
    Caveat,
    ModuleDescriptor,
    UnsupportedShapeError,
    WeightTag,
    auxiliary_restriction,
    b_function,
    generic_rank,
    restrict_first_variable,
    restrict_hyperplane,
    restrict_to_plane,
)
from .series import (
    FormalSeries,
    MinimalSupportAnswer,
    apply_contiguity,
    exponent_series,
    gamma_coefficient,
    gamma_series,
    has_minimal_negative_support,
    inverse_contiguity,
    negative_support,
    series_from_json,
    substitute_x0,
    witness_defect,
    witness_series,
)
from .weyl import (
    AnnihilationReport,
    TrustedSeries,
    WeylOperator,
    annihilation_report,
    apply,
    box_operator,
    euler_operator,
    initial_form,
    named_generators,
    series_match_on_window,
    toric_generators,
)
