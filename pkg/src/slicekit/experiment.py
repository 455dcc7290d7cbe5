"""Trial runners and the end-to-end experiment used by the CLI."""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from slicekit.domain import Assignment, Scenario, SimilarityMatrix
from slicekit.errors import ConfigInvalid, GatewayError, ParseError
from slicekit.evaluation import MetricsReport, aggregate, metrics, validate
from slicekit.ilp import DEFAULT_NODE_LIMIT, SolveResult, SolveStatus, build_formulation, solve
from slicekit.llm import ProviderConfig, zero_shot_assign
from slicekit.llm.mock import MOCKS, make_mock
from slicekit.llm.providers import ChatProvider, HttpChatProvider, require_api_key
from slicekit.report import build_report
from slicekit.scenario import GeneratorConfig, generate, save_scenario
from slicekit.similarity import baseline_similarity, llm_similarity, matrix_agreement, save_similarity

log = logging.getLogger(__name__)

ProviderFactory = Callable[[Scenario], ChatProvider]


def trial_seeds(base_seed: int, trials: int) -> list[int]:
    """Independent 64-bit shuffle seeds, one per trial, derived from ``base_seed``."""
    if trials <= 0:
        return []
    state = np.random.SeedSequence(base_seed).generate_state(trials, dtype=np.uint64)
    return [int(s) for s in state]


def provider_factory(mock: str | None, config: ProviderConfig) -> ProviderFactory:
    """Mock name wins; otherwise an HTTP provider (the API key is checked now)."""
    if mock is not None:
        if mock not in MOCKS:
            raise ConfigInvalid(f"unknown mock {mock!r}; choose from {sorted(MOCKS)}")
        return lambda scenario: make_mock(mock, scenario)
    require_api_key(config.api_key_env)
    return lambda scenario: HttpChatProvider(config)


def _dump(path: Path, data: Any) -> None:
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


def _assignment_dict(assignment: Assignment | None) -> dict[str, Any]:
    rows = assignment.rows if assignment is not None else ()
    return {"rows": [{"slice": r.slice_id, "request": r.request_id, "units": r.allocated_units} for r in rows]}


def record_trial(
    out_dir: Path,
    method: str,
    trial: int,
    scenario: Scenario,
    assignment: Assignment | None,
    extra: dict[str, Any] | None = None,
    error: str | None = None,
    solve_result: SolveResult | None = None,
) -> dict[str, Any]:
    """Persist assignment, violations and metrics for one trial; returns the metrics record."""
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"trial_{trial:03d}"
    record: dict[str, Any] = {"method": method, "trial": trial, "status": "ok", "error": error}
    record.update(extra or {})
    if assignment is None:
        record["status"] = "failed"
        record["metrics"] = None
    else:
        report = validate(scenario, assignment)
        record["metrics"] = metrics(scenario, assignment, report).to_dict()
        _dump(out_dir / f"{stem}.violations.json", report.to_list())
    payload = solve_result.to_dict() if solve_result is not None else _assignment_dict(assignment)
    _dump(out_dir / f"{stem}.assignment.json", payload)
    _dump(out_dir / f"{stem}.metrics.json", record)
    return record


def write_method_csv(out_dir: Path, records: list[dict[str, Any]]) -> Path:
    """One row per trial plus a final ``aggregate`` row holding "mean ± std" cells."""
    ok = [MetricsReport.from_dict(r["metrics"]) for r in records if r["metrics"] is not None]
    rows = []
    for r in records:
        row = {"method": r["method"], "trial": r["trial"], "status": r["status"]}
        if r["metrics"] is not None:
            row.update(MetricsReport.from_dict(r["metrics"]).csv_row())
        rows.append(row)
    if ok:
        agg = aggregate(ok)
        row = {
            "method": records[0]["method"],
            "trial": "aggregate",
            "status": f"{len(ok)}/{len(records)} ok",
            "completeness_pct": str(agg.completeness_pct),
            "homogeneity": str(agg.homogeneity) if agg.homogeneity else "",
            "violation_count": str(agg.violation_count),
        }
        for sid, st in agg.bandwidth_utilization.items():
            row[f"bandwidth_{sid}"] = str(st)
        for sid, st in agg.density_utilization.items():
            row[f"density_{sid}"] = str(st)
        rows.append(row)
    fields = list(dict.fromkeys(k for row in rows for k in row))
    path = out_dir / "metrics.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return path


def run_zero_shot(
    scenario: Scenario,
    factory: ProviderFactory,
    out_dir: Path,
    *,
    trials: int,
    base_seed: int = 0,
    temperature: float = 0.8,
    max_retries: int = 2,
    parallelism: int = 1,
    method: str = "zero-shot",
) -> list[dict[str, Any]]:
    """Independent zero-shot trials, each with its own request shuffle.

    Gateway and parse failures mark the trial failed; the run continues.
    """
    seeds = trial_seeds(base_seed, trials)

    def one(k: int) -> dict[str, Any]:
        extra = {"shuffle_seed": seeds[k]}
        try:
            assignment = zero_shot_assign(
                scenario, factory(scenario), seeds[k], temperature=temperature, max_retries=max_retries
            )
        except (GatewayError, ParseError) as exc:
            log.warning("%s trial %d failed: %s", method, k, exc)
            return record_trial(out_dir, method, k, scenario, None, extra, f"{type(exc).__name__}: {exc}")
        return record_trial(out_dir, method, k, scenario, assignment, extra)

    with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
        records = list(pool.map(one, range(trials)))
    write_method_csv(out_dir, records)
    return records


def run_ilp(
    scenario: Scenario,
    sims: list[SimilarityMatrix],
    out_dir: Path,
    *,
    method: str,
    node_limit: int | None = DEFAULT_NODE_LIMIT,
) -> list[dict[str, Any]]:
    """Solve once per similarity matrix (identical matrices share one solve)."""
    baseline = baseline_similarity(scenario)
    cache: dict[frozenset, SolveResult] = {}
    records = []
    for k, sim in enumerate(sims):
        out_dir.mkdir(parents=True, exist_ok=True)
        save_similarity(sim, out_dir / f"trial_{k:03d}.similarity.json")
        if sim.similar not in cache:
            cache[sim.similar] = solve(build_formulation(scenario, sim), scenario, node_limit)
        result = cache[sim.similar]
        extra = {
            "solve_status": result.status.value,
            "objective": result.objective,
            "nodes": result.nodes_explored,
            "similarity_agreement": matrix_agreement(sim, baseline),
        }
        assignment = result.assignment if result.status is SolveStatus.OPTIMAL else None
        error = None if assignment is not None else result.status.value
        records.append(record_trial(out_dir, method, k, scenario, assignment, extra, error, result))
    write_method_csv(out_dir, records)
    return records


@dataclass
class ExperimentConfig:
    """Single reproducibility file for a study.

    ``mock`` names the zero-shot mock; when set, similarity judgments also come
    from a mock (which answers by archetype). Without it the HTTP provider in
    ``provider`` is used for both.
    """

    generator: GeneratorConfig = field(default_factory=GeneratorConfig)
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    mock: str | None = "greedy-by-class"
    trials: int = 10
    base_seed: int = 0
    batch_size: int = 50
    fallback: int | None = 0
    node_limit: int = DEFAULT_NODE_LIMIT
    zero_shot: bool = True
    ilp_baseline: bool = True
    ilp_llm: bool = True

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        methods = data.get("methods", {})
        try:
            return cls(
                generator=GeneratorConfig.from_dict(data.get("generator", {})),
                provider=ProviderConfig.from_dict(data.get("provider", {})),
                mock=data.get("mock", "greedy-by-class"),
                trials=int(data.get("trials", 10)),
                base_seed=int(data.get("base_seed", 0)),
                batch_size=int(data.get("batch_size", 50)),
                fallback=data.get("fallback", 0),
                node_limit=int(data.get("node_limit", DEFAULT_NODE_LIMIT)),
                zero_shot=bool(methods.get("zero_shot", True)),
                ilp_baseline=bool(methods.get("ilp_baseline", True)),
                ilp_llm=bool(methods.get("ilp_llm", True)),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigInvalid(f"malformed experiment config: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"{path}: invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigInvalid(f"{path}: top level must be an object")
        return cls.from_dict(data)


def run_experiment(config: ExperimentConfig, out_dir: str | Path) -> Path:
    """generate -> zero-shot trials -> ILP (baseline and LLM similarity) -> report.

    Returns the report directory. The provider is resolved before anything is
    generated, so a missing API key fails fast.
    """
    factory = provider_factory(config.mock, config.provider)
    sim_factory = (lambda s: make_mock("greedy-by-class", s)) if config.mock else factory
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    scenario = generate(config.generator)
    save_scenario(scenario, out / "scenario.json")
    p = config.provider
    if config.zero_shot:
        run_zero_shot(
            scenario,
            factory,
            out / "zero-shot",
            trials=config.trials,
            base_seed=config.base_seed,
            temperature=p.temperature,
            max_retries=p.max_retries,
            parallelism=p.parallelism,
        )
    if config.ilp_baseline:
        run_ilp(
            scenario,
            [baseline_similarity(scenario)],
            out / "ilp-baseline",
            method="ilp-baseline",
            node_limit=config.node_limit,
        )
    if config.ilp_llm:
        sims = [
            llm_similarity(
                scenario,
                sim_factory(scenario),
                config.batch_size,
                fallback=config.fallback,
                temperature=p.temperature,
                max_retries=p.max_retries,
                parallelism=p.parallelism,
            )
            for _ in range(config.trials)
        ]
        run_ilp(scenario, sims, out / "ilp-llm", method="ilp-llm", node_limit=config.node_limit)
    report_dir = out / "report"
    build_report(out, report_dir)
    return report_dir
