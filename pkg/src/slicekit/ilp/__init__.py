"""Similarity-maximising assignment model, exact solver and brute-force oracle."""

from slicekit.ilp._kernel import DEFAULT_KERNEL, KERNELS
from slicekit.ilp.formulation import build_formulation
from slicekit.ilp.oracle import brute_force_oracle
from slicekit.ilp.solver import (
    DEFAULT_NODE_LIMIT,
    SolveResult,
    SolveStatus,
    colocated_similarity,
    solve,
)

__all__ = [
    "DEFAULT_KERNEL",
    "DEFAULT_NODE_LIMIT",
    "KERNELS",
    "SolveResult",
    "SolveStatus",
    "brute_force_oracle",
    "build_formulation",
    "colocated_similarity",
    "solve",
]
