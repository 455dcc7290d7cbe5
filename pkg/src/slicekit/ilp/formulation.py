from __future__ import annotations

from slicekit.domain import IlpFormulation, Scenario, SimilarityMatrix, latency_feasibility_mask
from slicekit.errors import DimensionMismatch


def build_formulation(scenario: Scenario, sim: SimilarityMatrix) -> IlpFormulation:
    """Latency mask plus the pair variables and objective terms that can ever be non-zero.

    Pairs with similarity 0, or with no allowed slice in common, are left out:
    they cannot contribute to the objective.
    """
    if sim.n != scenario.n:
        raise DimensionMismatch(f"similarity matrix is {sim.n}x{sim.n} but the scenario has {scenario.n} requests")
    allowed = tuple(tuple(row) for row in latency_feasibility_mask(scenario))
    pair_vars = []
    terms = []
    for i, j in sorted(sim.similar):
        shared = [m for m in range(scenario.m) if allowed[i][m] and allowed[j][m]]
        if shared:
            pair_vars.append((i, j))
            terms.extend((i, j, m) for m in shared)
    return IlpFormulation(allowed, tuple(pair_vars), tuple(terms))
