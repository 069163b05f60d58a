"""Numerical engine for the Apostol-Vu and Mordell-Tornheim double
zeta-functions: truncated series with provable tail bounds, finite-cutoff
approximation formulas beyond absolute convergence, and a mean-square
laboratory for the leading-coefficient and residual-exponent asymptotics."""

__version__ = "0.1.0"

from .constants import Constants, DEFAULT_CONSTANTS, load_constants, save_constants
from .continuation import (
    FirstApproxParams,
    RelationResidual,
    av2_approx_first,
    av2_approx_second,
    functional_relation_residual,
    mt2_approx,
)
from .errors import (
    ConfigError,
    DomainError,
    DoubleZetaError,
    InsufficientDataError,
    NumericalError,
    PathError,
    RegionError,
    SingularHyperplaneError,
)
from .kernel import (
    ApproxValue,
    QuadratureSpec,
    Truncation,
    dirichlet_tail,
    log_gamma,
    mellin_barnes_binomial,
    recip_pow,
    riemann_zeta_em,
    tail_integral,
    zeta_auto,
)
from .meansquare import (
    DirichletPoly,
    MeanSquarePlan,
    MeanSquareReport,
    RegimeClassification,
    classify_regime,
    fit_residual_exponent,
    mean_square,
    mv_check,
    residual_exponent_fit,
)
from .series import (
    DiagonalSeries,
    ZetaArgs,
    av2_direct,
    av2_sq,
    mt2_direct,
    mt2_sq,
)

__all__ = [
    "ApproxValue",
    "Constants",
    "ConfigError",
    "DEFAULT_CONSTANTS",
    "DiagonalSeries",
    "DirichletPoly",
    "DomainError",
    "DoubleZetaError",
    "FirstApproxParams",
    "InsufficientDataError",
    "MeanSquarePlan",
    "MeanSquareReport",
    "NumericalError",
    "PathError",
    "QuadratureSpec",
    "RegimeClassification",
    "RegionError",
    "RelationResidual",
    "SingularHyperplaneError",
    "Truncation",
    "ZetaArgs",
    "av2_approx_first",
    "av2_approx_second",
    "av2_direct",
    "av2_sq",
    "classify_regime",
    "dirichlet_tail",
    "fit_residual_exponent",
    "functional_relation_residual",
    "load_constants",
    "log_gamma",
    "mean_square",
    "mellin_barnes_binomial",
    "mt2_approx",
    "mt2_direct",
    "mt2_sq",
    "mv_check",
    "recip_pow",
    "residual_exponent_fit",
    "riemann_zeta_em",
    "save_constants",
    "tail_integral",
    "zeta_auto",
]
