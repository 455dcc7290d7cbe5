"""Command-line entry point: ``slicekit <command>``.

Exit codes: 0 success, 2 usage or input error, 3 infeasible, 4 node limit
reached, 5 gateway failure.
"""

from __future__ import annotations

import functools
import json
import logging
import sys
from pathlib import Path

import click

from slicekit.domain import Assignment, AssignmentRow
from slicekit.errors import GatewayError, InstanceTooLarge, ParseError, SlicekitError
from slicekit.evaluation import metrics, validate
from slicekit.experiment import ExperimentConfig, provider_factory, run_experiment, run_zero_shot
from slicekit.ilp import DEFAULT_NODE_LIMIT, SolveStatus, brute_force_oracle, build_formulation, solve
from slicekit.llm import ProviderConfig, parse_assignment_response
from slicekit.llm.mock import MOCKS
from slicekit.llm.providers import DEFAULT_API_KEY_ENV
from slicekit.report import build_report
from slicekit.scenario import GeneratorConfig, generate, load_scenario, save_scenario
from slicekit.similarity import baseline_similarity, llm_similarity, load_similarity, save_similarity

EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_NODE_LIMIT = 4
EXIT_GATEWAY = 5


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except GatewayError as exc:
            _fail(str(exc), EXIT_GATEWAY)
        except (SlicekitError, OSError, ValueError) as exc:
            _fail(f"{type(exc).__name__}: {exc}", EXIT_INPUT)

    return wrapper


def provider_options(fn):
    options = [
        click.option("--mock", type=click.Choice(sorted(MOCKS)), help="Use a deterministic mock instead of HTTP."),
        click.option("--endpoint", default=ProviderConfig.endpoint_url, show_default=True),
        click.option("--model", default=ProviderConfig.model_name, show_default=True),
        click.option("--api-key-env", default=DEFAULT_API_KEY_ENV, show_default=True),
        click.option("--temperature", type=click.FloatRange(0, 2), default=0.8, show_default=True),
        click.option("--max-retries", type=click.IntRange(min=0), default=2, show_default=True),
        click.option("--parallelism", type=click.IntRange(min=1), default=4, show_default=True),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _provider_config(endpoint, model, api_key_env, temperature, max_retries, parallelism) -> ProviderConfig:
    return ProviderConfig(
        endpoint_url=endpoint,
        model_name=model,
        api_key_env=api_key_env,
        temperature=temperature,
        max_retries=max_retries,
        parallelism=parallelism,
    )


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose: bool) -> None:
    """Network-slice allocation toolkit."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")


@main.command("generate")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
@click.option("--requests", "n_requests", type=click.IntRange(min=0), default=30, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="Generator config JSON.")
@click.option("-o", "--out", required=True, type=click.Path(dir_okay=False))
@handle_errors
def generate_cmd(seed: int, n_requests: int, config_path: str | None, out: str) -> None:
    """Generate a synthetic scenario file.

    With --config the file's values are used and --seed/--requests override
    them only when given explicitly.
    """
    ctx = click.get_current_context()
    data = json.loads(Path(config_path).read_text(encoding="utf-8")) if config_path else {}
    if not config_path or ctx.get_parameter_source("seed").name != "DEFAULT":
        data["seed"] = seed
    if not config_path or ctx.get_parameter_source("n_requests").name != "DEFAULT":
        data["n_requests"] = n_requests
    scenario = generate(GeneratorConfig.from_dict(data))
    save_scenario(scenario, out)
    click.echo(f"wrote {out}: {scenario.m} slices, {scenario.n} requests")


@main.command("assign-llm")
@click.argument("scenario_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
@click.option("--trials", type=click.IntRange(min=1), default=10, show_default=True)
@click.option("--base-seed", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--method", default="zero-shot", show_default=True, help="Label recorded with every trial.")
@provider_options
@handle_errors
def assign_llm_cmd(scenario_path, out_dir, trials, base_seed, method, mock, **provider) -> None:
    """Run zero-shot LLM assignment trials and record their metrics."""
    config = _provider_config(**provider)
    factory = provider_factory(mock, config)
    scenario = load_scenario(scenario_path)
    records = run_zero_shot(
        scenario,
        factory,
        Path(out_dir),
        trials=trials,
        base_seed=base_seed,
        temperature=config.temperature,
        max_retries=config.max_retries,
        parallelism=config.parallelism,
        method=method,
    )
    failed = sum(r["metrics"] is None for r in records)
    click.echo(f"{trials - failed}/{trials} trials parsed; results in {out_dir}")


@main.command("solve")
@click.argument("scenario_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--sim", "sim_spec", default="baseline", show_default=True, help="baseline | llm | file:PATH")
@click.option("-o", "--out", required=True, type=click.Path(dir_okay=False))
@click.option("--sim-out", type=click.Path(dir_okay=False), help="Also save the similarity matrix used.")
@click.option("--node-limit", type=click.IntRange(min=1), default=DEFAULT_NODE_LIMIT, show_default=True)
@click.option("--batch-size", type=click.IntRange(min=1), default=50, show_default=True)
@click.option(
    "--fallback",
    type=click.Choice(["0", "1", "none"]),
    default="0",
    show_default=True,
    help="Value for pairs the LLM never judged; 'none' makes gaps a gateway error.",
)
@click.option("--oracle", is_flag=True, hidden=True, help="Solve by exhaustive enumeration instead.")
@provider_options
@handle_errors
def solve_cmd(
    scenario_path, sim_spec, out, sim_out, node_limit, batch_size, fallback, oracle, mock, **provider
) -> None:
    """Solve the similarity-maximising assignment for a scenario."""
    scenario = load_scenario(scenario_path)
    if sim_spec == "baseline":
        sim = baseline_similarity(scenario)
    elif sim_spec == "llm":
        config = _provider_config(**provider)
        gateway = provider_factory(mock, config)(scenario)
        sim = llm_similarity(
            scenario,
            gateway,
            batch_size,
            fallback=None if fallback == "none" else int(fallback),
            temperature=config.temperature,
            max_retries=config.max_retries,
            parallelism=config.parallelism,
        )
    elif sim_spec.startswith("file:"):
        sim = load_similarity(sim_spec[len("file:") :])
    else:
        raise click.UsageError(f"--sim must be baseline, llm or file:PATH, not {sim_spec!r}")
    formulation = build_formulation(scenario, sim)
    if sim_out:
        save_similarity(sim, sim_out)
    if oracle:
        try:
            result = brute_force_oracle(scenario, sim)
        except InstanceTooLarge as exc:
            raise click.UsageError(str(exc)) from None
    else:
        result = solve(formulation, scenario, node_limit)
    Path(out).write_text(json.dumps(result.to_dict(), indent=2) + "\n", encoding="utf-8")
    if result.status is SolveStatus.INFEASIBLE:
        _fail("no complete capacity- and latency-feasible assignment exists", EXIT_INFEASIBLE)
    if result.status is SolveStatus.NODE_LIMIT:
        _fail(f"node limit of {node_limit} reached (best objective so far {result.objective})", EXIT_NODE_LIMIT)
    report = validate(scenario, result.assignment)
    if report:
        raise AssertionError(f"solver returned an infeasible assignment: {report.to_list()}")
    click.echo(f"OPTIMAL objective={result.objective} nodes={result.nodes_explored} -> {out}")


def read_assignment(path: str) -> Assignment:
    """Assignment JSON (``{"rows": [...]}``) or a raw response with a fenced block."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        return parse_assignment_response(text)
    try:
        rows = tuple(AssignmentRow(r["slice"], r["request"], r["units"]) for r in data["rows"])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"{path}: not an assignment file ({exc})") from None
    return Assignment(rows)


@main.command("evaluate")
@click.argument("scenario_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("assignment_path", type=click.Path(exists=True, dir_okay=False))
@handle_errors
def evaluate_cmd(scenario_path: str, assignment_path: str) -> None:
    """Print metrics and violations for an assignment as JSON."""
    scenario = load_scenario(scenario_path)
    assignment = read_assignment(assignment_path)
    report = validate(scenario, assignment)
    out = metrics(scenario, assignment, report).to_dict()
    out["violations"] = report.to_list()
    click.echo(json.dumps(out, indent=2))


@main.command("report")
@click.argument("run_dir", type=click.Path(exists=True, file_okay=False))
@click.argument("out_dir", type=click.Path(file_okay=False))
@handle_errors
def report_cmd(run_dir: str, out_dir: str) -> None:
    """Summarise per-trial metrics into table.csv and utilization SVG charts."""
    for path in build_report(run_dir, out_dir):
        click.echo(f"wrote {path}")


@main.command("run-experiment")
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--out-dir", required=True, type=click.Path(file_okay=False))
@handle_errors
def run_experiment_cmd(config_path: str, out_dir: str) -> None:
    """Generate, assign, solve, evaluate and report in one go."""
    config = ExperimentConfig.load(config_path)
    report_dir = run_experiment(config, out_dir)
    click.echo(f"report written to {report_dir}")


if __name__ == "__main__":
    main()
