"""Krylov approximations to rational matrix functions.

Lanczos-OR (optimal in the norm induced by the stabilized denominator), its
constant-memory streaming form, the Lanczos-FA / CG / MINRES / QMR family,
and the sign-function and spectrum-CDF methods built on top of them.
"""

from ._kernels import BACKEND
from .errors import (
    BreakdownError,
    ConvergenceError,
    FunctionDomainError,
    NumericalError,
    PivotError,
)
from .lanczos import BufferAudit, LanczosRecurrence, lanczos, shift_recurrence
from .linalg import (
    BandedSymmetricMatrix,
    DiagonalOperator,
    MatrixOperator,
    SparseSymmetricOperator,
    SymmetricLinearOperator,
    apply_matrix_function_small,
    banded_to_dense,
    dense_sym_eigendecomposition,
    dot,
    read_eigenvalues,
    tridiag_eigendecomposition,
)
from .ldl import LDLFactorization, dense_ldl
from .matfun import (
    QuadratureRule,
    build_sign_quadrature,
    harmonic_ritz_values,
    rational_termwise_or,
    sign_coalescence_gap,
    sign_harmonic_iterate,
    sign_or_iterate,
    spectrum_cdf,
    spectrum_cdf_fa,
    spectrum_cdf_harmonic,
    strict_sign,
)
from .rational import (
    PartialFractionTerm,
    RationalFunctionSpec,
    SpectrumInterval,
    StabilizedPair,
    lanczos_fa_iterate,
    lanczos_or_iterate,
    polynomial_bound_certificate,
    stabilize,
    two_pass_lanczos_fa,
)
from .solvers import cg_iterate, hnorm_projection_oracle, minres_iterate, qmr_shifted_iterate, restarted_cg
from .streaming import BandedRationalProcessor, lanczos_fa_lm, lanczos_or_lm
from .tridiag import StreamingTridiagonalSquare, get_poly, truncated_poly_of_extended

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BreakdownError",
    "ConvergenceError",
    "FunctionDomainError",
    "NumericalError",
    "PivotError",
    "BufferAudit",
    "LanczosRecurrence",
    "lanczos",
    "shift_recurrence",
    "BandedSymmetricMatrix",
    "DiagonalOperator",
    "MatrixOperator",
    "SparseSymmetricOperator",
    "SymmetricLinearOperator",
    "apply_matrix_function_small",
    "banded_to_dense",
    "dense_sym_eigendecomposition",
    "dot",
    "read_eigenvalues",
    "tridiag_eigendecomposition",
    "LDLFactorization",
    "dense_ldl",
    "QuadratureRule",
    "build_sign_quadrature",
    "harmonic_ritz_values",
    "rational_termwise_or",
    "sign_coalescence_gap",
    "sign_harmonic_iterate",
    "sign_or_iterate",
    "spectrum_cdf",
    "spectrum_cdf_fa",
    "spectrum_cdf_harmonic",
    "strict_sign",
    "PartialFractionTerm",
    "RationalFunctionSpec",
    "SpectrumInterval",
    "StabilizedPair",
    "lanczos_fa_iterate",
    "lanczos_or_iterate",
    "polynomial_bound_certificate",
    "stabilize",
    "two_pass_lanczos_fa",
    "cg_iterate",
    "hnorm_projection_oracle",
    "minres_iterate",
    "qmr_shifted_iterate",
    "restarted_cg",
    "BandedRationalProcessor",
    "lanczos_fa_lm",
    "lanczos_or_lm",
    "StreamingTridiagonalSquare",
    "get_poly",
    "truncated_poly_of_extended",
]
