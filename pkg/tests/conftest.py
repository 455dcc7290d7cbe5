from __future__ import annotations

import random
from itertools import combinations

import pytest

from slicekit.domain import Request, Scenario, SimilarityMatrix, Slice, SliceClass

E, U, M = SliceClass.EMBB, SliceClass.URLLC, SliceClass.MMTC


def make_scenario(slices, requests, seed=0) -> Scenario:
    """slices: (capacity, latency[, connections]); requests: (demand, latency[, archetype])."""
    classes = [E, U, M]
    built_slices = [
        Slice(f"Slice{chr(65 + k)}", classes[k % 3], s[0], s[1], s[2] if len(s) > 2 else 10)
        for k, s in enumerate(slices)
    ]
    built_requests = [
        Request(f"Request{k + 1}", r[0], r[1], r[2] if len(r) > 2 else E, f"request {k + 1}")
        for k, r in enumerate(requests)
    ]
    return Scenario(tuple(built_slices), tuple(built_requests), seed)


def random_small_scenario(rng: random.Random, n_max: int = 10) -> Scenario:
    """Random instance with M=3; capacities are drawn tight enough to make some infeasible."""
    n = rng.randint(0, n_max)
    lat = [5.0, 50.0, 100.0]
    slices = [(rng.randint(0, 25), lat[m], rng.randint(1, 10)) for m in range(3)]
    requests = [
        (rng.randint(1, 8), rng.choice([5.0, 20.0, 50.0, 80.0, 100.0, 150.0]), rng.choice([E, U, M]))
        for _ in range(n)
    ]
    return make_scenario(slices, requests, seed=rng.randrange(2**32))


def random_similarity(rng: random.Random, n: int, p: float = 0.5) -> SimilarityMatrix:
    return SimilarityMatrix(n, frozenset(q for q in combinations(range(n), 2) if rng.random() < p))


@pytest.fixture
def tiny():
    """Three requests, one per archetype, each fitting its own slice."""
    return make_scenario(
        [(20, 50.0, 5), (10, 5.0, 5), (10, 100.0, 5)],
        [(8, 80.0, E), (2, 5.0, U), (1, 150.0, M)],
    )


ACCEPTANCE_RESULTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_RESULTS):
            terminalreporter.write_line(line)
