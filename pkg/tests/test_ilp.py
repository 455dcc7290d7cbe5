import os
import random
import subprocess
import sys
from itertools import combinations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slicekit.domain import Assignment, SimilarityMatrix, latency_feasibility_mask
from slicekit.errors import DimensionMismatch, InstanceTooLarge
from slicekit.evaluation import validate
from slicekit.ilp import (
    KERNELS,
    SolveStatus,
    brute_force_oracle,
    build_formulation,
    colocated_similarity,
    solve,
)
from slicekit.scenario import GeneratorConfig, generate
from slicekit.similarity import baseline_similarity

from conftest import make_scenario, random_similarity, random_small_scenario


def full_sim(n):
    return SimilarityMatrix(n, frozenset(combinations(range(n), 2)))


def enumerate_best(scenario, sim):
    """Independent reference: plain itertools enumeration over every slice vector."""
    best = None
    for vec in product(range(scenario.m), repeat=scenario.n):
        ok = all(scenario.slices[m].latency_guarantee_ms <= r.latency_req_ms for r, m in zip(scenario.requests, vec))
        for m, s in enumerate(scenario.slices):
            ok = ok and sum(r.demand for r, v in zip(scenario.requests, vec) if v == m) <= s.capacity
        if not ok:
            continue
        score = sum(1 for i, j in sim.similar if vec[i] == vec[j])
        if best is None or score > best[0]:
            best = (score, vec)
    return best


# build_formulation


def test_all_zero_similarity_has_no_terms():
    s = make_scenario([(10, 5.0)] * 3, [(1, 10.0)] * 4)
    f = build_formulation(s, SimilarityMatrix(4))
    assert f.objective_terms == () and f.pair_vars == ()


def test_mask_forces_single_term():
    s = make_scenario([(10, 50.0), (10, 5.0), (10, 100.0)], [(1, 5.0), (1, 6.0)])
    f = build_formulation(s, full_sim(2))
    assert f.objective_terms == ((0, 1, 1),)


def test_term_count_all_similar_all_allowed():
    s = make_scenario([(10, 5.0)] * 3, [(1, 10.0)] * 4)
    assert len(build_formulation(s, full_sim(4)).objective_terms) == 6 * 3


def test_pair_vars_keep_every_similar_pair_with_a_common_slice():
    # the fastest slice is latency-compatible with every request, so all similar pairs share one
    s = generate(GeneratorConfig(seed=3, n_requests=15))
    sim = random_similarity(random.Random(3), s.n)
    f = build_formulation(s, sim)
    assert set(f.pair_vars) == set(sim.similar)
    assert all(f.allowed[i][m] and f.allowed[j][m] for i, j, m in f.objective_terms)
    assert f.allowed == tuple(tuple(row) for row in latency_feasibility_mask(s))


def test_formulation_dimension_mismatch():
    s = make_scenario([(10, 5.0)], [(1, 10.0)] * 2)
    with pytest.raises(DimensionMismatch):
        build_formulation(s, SimilarityMatrix(3))


# solve: worked examples


@pytest.mark.parametrize("kernel", sorted(KERNELS))
def test_two_similar_requests_colocate(kernel):
    s = make_scenario([(10, 5.0)], [(2, 10.0), (2, 10.0)])
    r = solve(build_formulation(s, full_sim(2)), s, kernel=kernel)
    assert r.status is SolveStatus.OPTIMAL
    assert r.objective == 1
    assert {row.slice_id for row in r.assignment.rows} == {"SliceA"}


@pytest.mark.parametrize("kernel", sorted(KERNELS))
def test_three_similar_requests_capacity_eight(kernel):
    s = make_scenario([(8, 5.0)] * 3, [(4, 10.0)] * 3)
    expected, _ = enumerate_best(s, full_sim(3))
    assert expected == 1
    r = solve(build_formulation(s, full_sim(3)), s, kernel=kernel)
    assert r.objective == expected
    # lexicographically smallest optimum: (0, 0, 1)
    assert [row.slice_id for row in r.assignment.rows] == ["SliceA", "SliceA", "SliceB"]


@pytest.mark.parametrize("kernel", sorted(KERNELS))
def test_oversized_request_is_infeasible(kernel):
    s = make_scenario([(49, 5.0), (10, 5.0), (0, 5.0)], [(50, 10.0)])
    r = solve(build_formulation(s, SimilarityMatrix(1)), s, kernel=kernel)
    assert r.status is SolveStatus.INFEASIBLE and r.assignment is None


@pytest.mark.parametrize("kernel", sorted(KERNELS))
def test_empty_scenario(kernel):
    s = make_scenario([(1, 5.0)], [])
    r = solve(build_formulation(s, SimilarityMatrix(0)), s, kernel=kernel)
    assert r.status is SolveStatus.OPTIMAL and r.objective == 0 and len(r.assignment) == 0


@pytest.mark.parametrize("kernel", sorted(KERNELS))
def test_node_limit_keeps_incumbent(kernel):
    s = generate(GeneratorConfig(seed=4, n_requests=20))
    f = build_formulation(s, baseline_similarity(s))
    r = solve(f, s, node_limit=30, kernel=kernel)
    assert r.status is SolveStatus.NODE_LIMIT
    assert r.nodes_explored == 31
    if r.assignment is not None:
        assert not validate(s, r.assignment)
        assert colocated_similarity(s, r.assignment, set(f.pair_vars)) == r.objective


def test_kernels_agree_on_generated_instances():
    if len(KERNELS) < 2:
        pytest.skip("compiled kernel not built")
    for seed in range(15):
        s = generate(GeneratorConfig(seed=seed, n_requests=22))
        sim = random_similarity(random.Random(seed), s.n, 0.3)
        f = build_formulation(s, sim)
        a, b = (solve(f, s, kernel=k) for k in ("python", "cython"))
        assert a == b


def test_generated_infeasible_seed():
    s = generate(GeneratorConfig(seed=102, n_requests=30))
    r = solve(build_formulation(s, baseline_similarity(s)), s)
    assert r.status is SolveStatus.INFEASIBLE


# oracle


def test_oracle_examples():
    s = make_scenario([(1, 5.0)], [])
    r = brute_force_oracle(s, SimilarityMatrix(0))
    assert (r.status, r.objective, len(r.assignment)) == (SolveStatus.OPTIMAL, 0, 0)
    s = make_scenario([(5, 5.0), (100, 50.0), (100, 100.0)], [(3, 6.0), (3, 6.0)])
    assert brute_force_oracle(s, full_sim(2)).status is SolveStatus.INFEASIBLE


def test_oracle_guard():
    s = make_scenario([(100, 5.0)] * 3, [(1, 10.0)] * 15)
    with pytest.raises(InstanceTooLarge):
        brute_force_oracle(s, SimilarityMatrix(15))


def test_oracle_matches_plain_enumeration():
    rng = random.Random(99)
    for _ in range(40):
        s = random_small_scenario(rng, n_max=6)
        sim = random_similarity(rng, s.n)
        ref = enumerate_best(s, sim)
        r = brute_force_oracle(s, sim)
        if ref is None:
            assert r.status is SolveStatus.INFEASIBLE
        else:
            assert r.objective == ref[0]
            assert r.assignment == Assignment.from_vector(s, ref[1])


@pytest.mark.parametrize("kernel", sorted(KERNELS))
def test_solver_matches_oracle_exactly(kernel):
    rng = random.Random(2024)
    for _ in range(60):
        s = random_small_scenario(rng, n_max=9)
        for sim in (baseline_similarity(s), random_similarity(rng, s.n)):
            got = solve(build_formulation(s, sim), s, kernel=kernel)
            ref = brute_force_oracle(s, sim)
            assert (got.status, got.objective, got.assignment) == (ref.status, ref.objective, ref.assignment)


# properties


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_linking_consistency_and_feasibility(seed):
    rng = random.Random(seed)
    s = random_small_scenario(rng, n_max=12)
    sim = random_similarity(rng, s.n, rng.random())
    r = solve(build_formulation(s, sim), s)
    if r.status is SolveStatus.OPTIMAL:
        assert colocated_similarity(s, r.assignment, sim.similar) == r.objective
        assert not validate(s, r.assignment)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_adding_a_similar_pair_never_lowers_the_optimum(seed):
    rng = random.Random(seed)
    s = random_small_scenario(rng, n_max=9)
    sim = random_similarity(rng, s.n, 0.4)
    zeros = [(i, j) for i, j, v in sim.pairs() if v == 0]
    if not zeros:
        return
    before = solve(build_formulation(s, sim), s)
    i, j = rng.choice(zeros)
    after = solve(build_formulation(s, sim.with_value(i, j, 1)), s)
    assert after.status == before.status
    assert after.objective >= before.objective


def test_solve_is_deterministic():
    s = generate(GeneratorConfig(seed=9, n_requests=30))
    f = build_formulation(s, baseline_similarity(s))
    assert solve(f, s) == solve(f, s)


def test_solve_result_json_shape():
    s = make_scenario([(10, 5.0)], [(2, 10.0), (3, 10.0)])
    d = solve(build_formulation(s, full_sim(2)), s).to_dict()
    assert d == {
        "rows": [
            {"slice": "SliceA", "request": "Request1", "units": 2},
            {"slice": "SliceA", "request": "Request2", "units": 3},
        ],
        "objective": 1,
        "status": "OPTIMAL",
        "nodes": d["nodes"],
    }


def _default_kernel(env_value):
    env = {k: v for k, v in os.environ.items() if k != "SLICEKIT_PURE_PYTHON"}
    if env_value is not None:
        env["SLICEKIT_PURE_PYTHON"] = env_value
    out = subprocess.run(
        [sys.executable, "-c", "from slicekit.ilp._kernel import DEFAULT_KERNEL; print(DEFAULT_KERNEL)"],
        env=env, capture_output=True, text=True, check=True,
    )
    return out.stdout.strip()


def test_fallback_selected_by_environment():
    assert _default_kernel("1") == "python"
    assert _default_kernel(None) == ("cython" if "cython" in KERNELS else "python")
