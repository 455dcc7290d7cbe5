"""Exact solver for the similarity-maximising slice assignment model.

The search is a depth-first branch-and-bound over requests (descending demand,
then index) and slices (ascending index). Among equal-objective optima the
lexicographically smallest slice-index vector, in request order, is returned.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations
from typing import Any

from slicekit.domain import Assignment, IlpFormulation, Scenario
from slicekit.errors import DimensionMismatch
from slicekit.ilp._kernel import get_kernel

DEFAULT_NODE_LIMIT = 5_000_000


class SolveStatus(str, enum.Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    NODE_LIMIT = "NODE_LIMIT"


@dataclass(frozen=True)
class SolveResult:
    assignment: Assignment | None
    objective: int
    status: SolveStatus
    nodes_explored: int

    def to_dict(self) -> dict[str, Any]:
        rows = self.assignment.rows if self.assignment is not None else ()
        return {
            "rows": [
                {"slice": r.slice_id, "request": r.request_id, "units": r.allocated_units} for r in rows
            ],
            "objective": self.objective,
            "status": self.status.value,
            "nodes": self.nodes_explored,
        }


def branch_order(scenario: Scenario) -> list[int]:
    return sorted(range(scenario.n), key=lambda i: (-scenario.requests[i].demand, i))


def neighbour_lists(formulation: IlpFormulation, scenario: Scenario) -> list[list[int]]:
    nbrs: list[list[int]] = [[] for _ in range(formulation.n)]
    for i, j in formulation.pair_vars:
        nbrs[i].append(j)
        nbrs[j].append(i)
    demand = [r.demand for r in scenario.requests]
    for row in nbrs:
        row.sort(key=lambda v: (demand[v], v))
    return nbrs


def solve(
    formulation: IlpFormulation,
    scenario: Scenario,
    node_limit: int | None = DEFAULT_NODE_LIMIT,
    kernel: str | None = None,
) -> SolveResult:
    """Solve to proven optimality unless ``node_limit`` nodes are exhausted first.

    ``kernel`` selects "cython" or "python"; the default is whichever was
    chosen at import.
    """
    if formulation.n != scenario.n or any(len(row) != scenario.m for row in formulation.allowed):
        raise DimensionMismatch("formulation does not match the scenario's dimensions")
    search = get_kernel(kernel)
    objective, vector, nodes, hit = search(
        [r.demand for r in scenario.requests],
        [s.capacity for s in scenario.slices],
        [[1 if a else 0 for a in row] for row in formulation.allowed],
        neighbour_lists(formulation, scenario),
        branch_order(scenario),
        node_limit or 0,
    )
    assignment = Assignment.from_vector(scenario, vector) if vector is not None else None
    if hit:
        status = SolveStatus.NODE_LIMIT
    elif vector is None:
        status = SolveStatus.INFEASIBLE
    else:
        status = SolveStatus.OPTIMAL
    return SolveResult(assignment, objective, status, nodes)


def colocated_similarity(scenario: Scenario, assignment: Assignment, similar) -> int:
    """Number of similar pairs that share a slice, recomputed from the assignment alone."""
    where = assignment.slice_of()
    ids = [r.id for r in scenario.requests]
    total = 0
    for i, j in combinations(range(len(ids)), 2):
        if (i, j) in similar and ids[i] in where and where.get(ids[i]) == where.get(ids[j]):
            total += 1
    return total
