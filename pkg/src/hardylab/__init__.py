"""Numerical laboratory for sharp Hardy-type inequalities with negative exponents."""

from .core import (
    Constant,
    ConvergenceError,
    DomainError,
    Exponents,
    ExtremalG,
    ExtremalPhi,
    InequalityReport,
    Interval,
    Power,
    PrefixState,
    QuadratureConfig,
    SequenceData,
    Step,
    Tabulated,
    ToleranceConfig,
    evaluate_weight,
    validate_exponents,
    weight_from_dict,
)

__version__ = "0.1.0"
