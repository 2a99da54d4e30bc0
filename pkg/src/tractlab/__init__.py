"""Numerical laboratory for tract growth and escaping-set measure of entire functions."""

__version__ = "0.1.0"

from .catalog import (
    ErdosIntegral,
    ExpFamily,
    FnValue,
    LogModulus,
    MittagLeffler,
    MittagLefflerPower,
    ParameterError,
    DomainError,
    ScaledMittagLefflerPower,
    SineFamily,
    evaluate,
    eval_mittag_leffler,
    log_eval,
    log_modulus,
    max_modulus,
    order_estimate,
    sector_bound_check,
)
from .schroeder import SchroederSolution, solve_fixed_point, delta_sequence
from .tracts import PolarGrid, RadialProfile, TractDecomposition, decompose, tsuji_integral
from .measure import SquareRegion, EscapeGridReport

__all__ = [
    "__version__",
    "ExpFamily",
    "SineFamily",
    "MittagLeffler",
    "MittagLefflerPower",
    "ScaledMittagLefflerPower",
    "ErdosIntegral",
    "FnValue",
    "LogModulus",
    "ParameterError",
    "DomainError",
    "evaluate",
    "eval_mittag_leffler",
    "log_eval",
    "log_modulus",
    "max_modulus",
    "order_estimate",
    "sector_bound_check",
    "SchroederSolution",
    "solve_fixed_point",
    "delta_sequence",
    "PolarGrid",
    "RadialProfile",
    "TractDecomposition",
    "decompose",
    "tsuji_integral",
    "SquareRegion",
    "EscapeGridReport",
]
