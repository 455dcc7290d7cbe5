"""Exhaustive-enumeration oracle for cross-checking the branch-and-bound solver."""

from __future__ import annotations

import numpy as np

from slicekit.domain import Assignment, Scenario, SimilarityMatrix, latency_feasibility_mask
from slicekit.errors import DimensionMismatch, InstanceTooLarge
from slicekit.ilp.solver import SolveResult, SolveStatus

MAX_ENUMERATION = 10**7


def _cartesian(choices: list[list[int]]) -> np.ndarray:
    """All combinations, one per row, in lexicographic order of the choice lists."""
    out = np.zeros((1, 0), dtype=np.int8)
    for options in choices:
        k = len(options)
        out = np.concatenate(
            [np.repeat(out, k, axis=0), np.tile(np.asarray(options, dtype=np.int8), len(out))[:, None]],
            axis=1,
        )
    return out


def brute_force_oracle(scenario: Scenario, sim: SimilarityMatrix) -> SolveResult:
    """Enumerate every latency-feasible complete assignment and keep the best.

    Ties go to the lexicographically smallest slice-index vector, matching
    :func:`slicekit.ilp.solver.solve`.
    """
    if sim.n != scenario.n:
        raise DimensionMismatch(f"similarity matrix is {sim.n}x{sim.n} but the scenario has {scenario.n} requests")
    if scenario.m**scenario.n > MAX_ENUMERATION:
        raise InstanceTooLarge(f"{scenario.m}^{scenario.n} assignments exceed the {MAX_ENUMERATION} guard")
    mask = latency_feasibility_mask(scenario)
    choices = [[m for m, ok in enumerate(row) if ok] for row in mask]
    vectors = _cartesian(choices)
    demand = np.array([r.demand for r in scenario.requests], dtype=np.int64)
    feasible = np.ones(len(vectors), dtype=bool)
    for m, s in enumerate(scenario.slices):
        load = ((vectors == m) * demand).sum(axis=1)
        feasible &= load <= s.capacity
    if not feasible.any():
        return SolveResult(None, 0, SolveStatus.INFEASIBLE, len(vectors))
    score = np.zeros(len(vectors), dtype=np.int64)
    for i, j in sim.similar:
        score += vectors[:, i] == vectors[:, j]
    score = np.where(feasible, score, -1)
    best = int(np.argmax(score))  # first maximum = lexicographically smallest
    return SolveResult(
        Assignment.from_vector(scenario, vectors[best].tolist()),
        int(score[best]),
        SolveStatus.OPTIMAL,
        len(vectors),
    )
