"""Superoptimal approximation, thematic factorizations and unitary interpolants
with prescribed Wiener-Hopf indices for rational matrix symbols on the unit circle."""

from .errors import *  # noqa: F401,F403
from .hankel import HankelSection, SchmidtPair, hankel_norm, schmidt, toeplitz_kernel_dim
from .interpolant import (
    InterpolantResult,
    ScalarStepRecord,
    matrix_interpolant,
    scalar_interpolant,
    unitary_interpolant,
)
from .matfun import (
    MatSymbol,
    ResidualReport,
    analyticity_residual,
    fourier_coeff,
    residual_report,
    unitarity_residual,
)
from .nehari import AAKResult, badly_approximable_check, best_approx_scalar
from .ring import Z, ZBAR, LaurentScalar, RationalScalar, inner_outer, roots, spectral_factor, winding
from .symfile import read_symbol, write_symbol
from .thematic import (
    FactorizationReport,
    ThematicMatrix,
    ThematicStep,
    superoptimal,
    thematic_complete,
    thematic_reduce,
    vector_inner_outer,
)
from .wh_index import IndexProfile, verify_interpolant, wh_indices

__version__ = "0.1.0"
