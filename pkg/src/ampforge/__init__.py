"""Polynomial transformations of real quantum state amplitudes.

Circuits are simulated exactly on state vectors; the eigenvalue transform
and amplitude amplification are realised at matrix level with their costs
reported analytically.
"""

from .applications import (
    MaxFindSpec,
    StatePrepSpec,
    benchmark_tanh,
    find_maximum,
    prepare_state,
    run_function_table,
)
from .approx import (
    CertifiedApproximation,
    approx_cos,
    approx_erf_shifted,
    approx_exp,
    approx_gaussian,
    approx_logistic,
    approx_sin,
    approx_tanh,
    compose_approx,
    library_function,
)
from .block_encoding import SPBE, BlockEncoding, extract_block, fixed_point_amplify, verify_encoding
from .circuits import StatePrepOracle, build_diag_encoding, build_sin_ladder
from .engine import (
    TransformReport,
    error_budget,
    function_transform,
    importance_transform,
    qet_apply,
    spbe_transform,
    uniform_transform,
)
from .errors import AmpforgeError
from .instances import random_real_state
from .linalg import StateVector, UnitaryCircuit
from .poly import Polynomial

__version__ = "0.1.0"

__all__ = [
    "AmpforgeError",
    "BlockEncoding",
    "CertifiedApproximation",
    "MaxFindSpec",
    "Polynomial",
    "SPBE",
    "StatePrepOracle",
    "StatePrepSpec",
    "StateVector",
    "TransformReport",
    "UnitaryCircuit",
    "approx_cos",
    "approx_erf_shifted",
    "approx_exp",
    "approx_gaussian",
    "approx_logistic",
    "approx_sin",
    "approx_tanh",
    "benchmark_tanh",
    "build_diag_encoding",
    "build_sin_ladder",
    "compose_approx",
    "error_budget",
    "extract_block",
    "find_maximum",
    "fixed_point_amplify",
    "function_transform",
    "importance_transform",
    "library_function",
    "prepare_state",
    "qet_apply",
    "random_real_state",
    "run_function_table",
    "spbe_transform",
    "uniform_transform",
    "verify_encoding",
]
