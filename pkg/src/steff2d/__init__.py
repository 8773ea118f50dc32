"""steff2d: numerical verification of bivariate monotonicity structure.

The package certifies 2d-monotonicity of bivariate functions, checks the
two-dimensional summation-by-parts identity and its sign inequality for
double sequences, validates copulas, integrates against 2d-monotone
Stieltjes measures, and verifies the associated integral identities and
inequalities (integration by parts, trigonometric-kernel sign results,
and the double-sum-versus-double-integral formula).
"""

from .copula import CopulaReport, Generator, InvalidGeneratorError, archimedean, validate_copula
from .core import ConvergenceError, IdentityResidual, NumericDomainError, Rect, Steff2dError
from .discrete import (
    DeltaTable,
    DoubleSequence,
    SteffensenReport,
    delta_table,
    hardy_residual,
    integrate_delta,
    partial_sums,
    steffensen_check,
)
from .expr import (
    BivariateFn,
    FloorDerivativeWarning,
    NonDifferentiableError,
    ParseError,
    UnivariateFn,
    differentiate,
    evaluate,
    parse,
    parse_univariate,
    to_string,
)
from .ineq import (
    BypartsResult,
    FourierCheck,
    Lemma1Report,
    TheoremReport,
    YoungResult,
    byparts_residual,
    fourier_check,
    lemma1_check,
    steffensen_integral,
    sum_vs_integral,
    young_residual,
)
from .monotone import (
    AcFunction,
    CatalogError,
    MonotonicityReport,
    catalog,
    certify,
    f_measure,
    from_ac,
    mixed_partial_fd,
)
from .quad import (
    CumulativePrimitive,
    Mollifier,
    QuadratureSpec,
    StieltjesResult,
    bump_normalization,
    cumulative,
    integrate1d,
    integrate2d,
    make_mollifier,
    mollify,
    stieltjes2d,
    stieltjes_vs_riemann,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # core
    "Rect", "IdentityResidual", "Steff2dError", "NumericDomainError", "ConvergenceError",
    # expr
    "parse", "parse_univariate", "evaluate", "differentiate", "to_string",
    "BivariateFn", "UnivariateFn", "ParseError", "NonDifferentiableError",
    "FloorDerivativeWarning",
    # discrete
    "DoubleSequence", "DeltaTable", "SteffensenReport", "partial_sums", "delta_table",
    "integrate_delta", "hardy_residual", "steffensen_check",
    # monotone
    "MonotonicityReport", "f_measure", "mixed_partial_fd", "certify", "catalog",
    "CatalogError", "AcFunction", "from_ac",
    # copula
    "Generator", "CopulaReport", "InvalidGeneratorError", "archimedean", "validate_copula",
    # quad
    "QuadratureSpec", "integrate1d", "integrate2d", "cumulative", "CumulativePrimitive",
    "StieltjesResult", "stieltjes2d", "stieltjes_vs_riemann", "Mollifier",
    "bump_normalization", "make_mollifier", "mollify",
    # ineq
    "YoungResult", "young_residual", "TheoremReport", "steffensen_integral",
    "FourierCheck", "fourier_check", "BypartsResult", "byparts_residual",
    "sum_vs_integral", "Lemma1Report", "lemma1_check",
]
