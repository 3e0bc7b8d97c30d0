"""Formal-orthogonal-polynomial toolkit.

Moment functionals, brute-force orthogonal polynomial construction,
recurrence-coefficient computation with existence certificates, and a
Lanczos-type iterative solver for Ax = b built on the degree-gap
recurrences of the residual and monic polynomial families.
"""
from .errors import (
    BootstrapBreakdown,
    BreakdownError,
    DimensionMismatch,
    DivisorBreakdown,
    GhostBreakdown,
    MomentRangeExceeded,
    NonexistentPolynomial,
    NormalizationBreakdown,
    NumericOverflow,
    RankDeficient,
    RestartsExhausted,
    SingularSystem,
    TrueBreakdown,
)
from .linalg import Matrix, as_vector, least_squares, matvec, solve_dense, transpose_matvec
from .moments import MomentSequence, apply_functional, compute_moments, hankel_det, hankel_is_zero
from .oracle import (
    FAMILY_P,
    FAMILY_P1,
    Polynomial,
    oracle_p,
    oracle_p1,
    poly_add,
    poly_matrix_apply,
    poly_scale,
    poly_shift_mul,
    polynomial,
)
from .recurrences import (
    A11,
    A13,
    A13Coeffs,
    A14,
    B11,
    B13,
    B13Coeffs,
    FORMS,
    FitReport,
    RelationForm,
    ScalarProducts,
    a13_coefficients,
    assemble_scalar_products,
    b13_coefficients,
    fit_relation,
)
from .solver import (
    SolveReport,
    SolverConfig,
    SolverState,
    bootstrap,
    restart,
    solve,
    step,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
