"""Inequality registry, exact-identity suite and fuzz loop."""

from .fuzzing import FuzzReport, campaign, fuzz
from .identities import identity_suite, pauli_average, pauli_matrices
from .outcome import DEFAULT_TOL, CheckOutcome
from .registry import REGISTRY, InequalityCase, case_ids, evaluate_check, get_case, run_case

__all__ = [
    "DEFAULT_TOL", "REGISTRY", "CheckOutcome", "FuzzReport", "InequalityCase",
    "campaign", "case_ids", "evaluate_check", "fuzz", "get_case", "identity_suite",
    "pauli_average", "pauli_matrices", "run_case",
]
