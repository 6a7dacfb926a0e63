"""Pseudo-multiplications on [0, inf]: axiom checks, finiteness, integrals."""

from .axioms import AxiomReport, GridSpec, check_all, find_left_identities
from .dsl import compile as compile_expr, parse as parse_expr
from .integral import MaxitiveSpace, SimpleFunction, integrate, measure
from .kernel import FinitenessClass, classify, is_finite, kernel_value
from .ops import (
    EvalError,
    PseudoMulOp,
    builtin,
    builtin_degenerate_right,
    builtin_min,
    builtin_tanh_phi,
    builtin_times,
)
from .theorems import TheoremReport, run_suite
from .xreal import INF, XReal

__all__ = [
    "AxiomReport", "EvalError", "FinitenessClass", "GridSpec", "INF", "MaxitiveSpace",
    "PseudoMulOp", "SimpleFunction", "TheoremReport", "XReal", "builtin",
    "builtin_degenerate_right", "builtin_min", "builtin_tanh_phi", "builtin_times",
    "check_all", "classify", "compile_expr", "find_left_identities", "integrate",
    "is_finite", "kernel_value", "measure", "parse_expr", "run_suite",
]
