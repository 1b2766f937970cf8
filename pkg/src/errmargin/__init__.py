"""Optimal discrimination with an error margin among three symmetric qubit states."""
from .analytic import (
    CriticalMargins,
    Domain,
    Solution,
    critical_margins,
    dual_certificate,
    max_success,
    optimal_povm,
    solve,
)
from .bloch import BlochOperator, combine, min_eigenvalue, pair_trace, product_residual_norm
from .measurement import DualCertificate, Povm
from .states import Ensemble, ParameterError, SymmetricFamily, build_family, to_ensemble

__all__ = [
    "BlochOperator",
    "CriticalMargins",
    "Domain",
    "DualCertificate",
    "Ensemble",
    "ParameterError",
    "Povm",
    "Solution",
    "SymmetricFamily",
    "build_family",
    "combine",
    "critical_margins",
    "dual_certificate",
    "max_success",
    "min_eigenvalue",
    "optimal_povm",
    "pair_trace",
    "product_residual_norm",
    "solve",
    "to_ensemble",
]
