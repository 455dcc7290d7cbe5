"""Binary similarity matrices from the archetype baseline or from LLM judgments."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations
from pathlib import Path
from typing import Any

from slicekit.domain import Scenario, SimilarityMatrix, SimilaritySource
from slicekit.errors import DimensionMismatch, GatewayError, SchemaViolation
from slicekit.llm.parsing import parse_similarity_response
from slicekit.llm.prompts import render_similarity_prompt
from slicekit.llm.providers import ChatProvider

log = logging.getLogger(__name__)


def baseline_similarity(scenario: Scenario) -> SimilarityMatrix:
    """1 for every pair of requests sharing a ground-truth archetype."""
    reqs = scenario.requests
    similar = frozenset(
        (i, j) for i, j in combinations(range(len(reqs)), 2) if reqs[i].archetype == reqs[j].archetype
    )
    return SimilarityMatrix(len(reqs), similar, SimilaritySource.HEURISTIC_BASELINE)


def _batches(pairs: list[tuple[int, int]], size: int) -> list[list[tuple[int, int]]]:
    return [pairs[k : k + size] for k in range(0, len(pairs), size)]


def _judge_batch(
    scenario: Scenario,
    provider: ChatProvider,
    batch: list[tuple[int, int]],
    temperature: float,
    max_retries: int,
) -> dict[tuple[int, int], int]:
    judged: dict[tuple[int, int], int] = {}
    pending = list(batch)
    for _ in range(max_retries + 1):
        bundle = render_similarity_prompt(scenario.requests, pending)
        text = provider.chat(bundle.system_text, bundle.user_text, temperature)
        judged.update(parse_similarity_response(text, pending))
        pending = [p for p in pending if p not in judged]
        if not pending:
            break
    return judged


def llm_similarity(
    scenario: Scenario,
    provider: ChatProvider,
    batch_size: int = 50,
    *,
    fallback: int | None = 0,
    temperature: float = 0.8,
    max_retries: int = 2,
    parallelism: int = 1,
) -> SimilarityMatrix:
    """Ask the provider about every unordered pair, ``batch_size`` pairs per prompt.

    A pair still missing or malformed after ``max_retries`` re-asks, or whose
    batch failed in transport, takes the ``fallback`` value. With
    ``fallback=None`` such gaps raise :class:`GatewayError` instead.
    """
    if batch_size < 1:
        raise ValueError("batch_size must be positive")
    pairs = list(combinations(range(scenario.n), 2))
    batches = _batches(pairs, batch_size)

    def run(batch):
        try:
            return _judge_batch(scenario, provider, batch, temperature, max_retries)
        except GatewayError as exc:
            if fallback is None:
                raise
            log.warning("similarity batch of %d pairs failed: %s", len(batch), exc)
            return {}

    with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
        results = list(pool.map(run, batches))
    judged: dict[tuple[int, int], int] = {}
    for part in results:
        judged.update(part)
    missing = [p for p in pairs if p not in judged]
    if missing:
        if fallback is None:
            raise GatewayError(f"no valid judgment for {len(missing)} pairs, e.g. {missing[0]}")
        log.info("filling %d unjudged pairs with %d", len(missing), fallback)
        for p in missing:
            judged[p] = fallback
    return SimilarityMatrix.from_entries(scenario.n, judged, SimilaritySource.LLM)


def matrix_agreement(a: SimilarityMatrix, b: SimilarityMatrix) -> float:
    """Fraction of unordered pairs on which the two matrices agree."""
    if a.n != b.n:
        raise DimensionMismatch(f"cannot compare {a.n}x{a.n} with {b.n}x{b.n}")
    total = a.n * (a.n - 1) // 2
    if total == 0:
        return 1.0
    return 1.0 - len(a.similar ^ b.similar) / total


def similarity_to_dict(sim: SimilarityMatrix) -> dict[str, Any]:
    return {"n": sim.n, "source": sim.source.value, "pairs": [[i, j, v] for i, j, v in sim.pairs()]}


def save_similarity(sim: SimilarityMatrix, path: str | Path) -> None:
    Path(path).write_text(json.dumps(similarity_to_dict(sim)) + "\n", encoding="utf-8")


def similarity_from_dict(data: Any) -> SimilarityMatrix:
    if not isinstance(data, dict):
        raise SchemaViolation("$", "top level must be an object")
    n = data.get("n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise SchemaViolation("n", "must be a non-negative integer")
    try:
        source = SimilaritySource(data.get("source", SimilaritySource.EXPLICIT.value))
    except ValueError:
        raise SchemaViolation("source", f"must be one of {[s.value for s in SimilaritySource]}") from None
    raw = data.get("pairs", [])
    if not isinstance(raw, list):
        raise SchemaViolation("pairs", "must be a list")
    seen = set()
    similar = set()
    for k, entry in enumerate(raw):
        ok = (
            isinstance(entry, list)
            and len(entry) == 3
            and all(isinstance(x, int) and not isinstance(x, bool) for x in entry)
        )
        if not ok:
            raise SchemaViolation(f"pairs[{k}]", "must be [i, j, v] with integers")
        i, j, v = entry
        if not 0 <= i < j < n:
            raise SchemaViolation(f"pairs[{k}]", f"needs 0 <= i < j < {n}")
        if v not in (0, 1):
            raise SchemaViolation(f"pairs[{k}]", "value must be 0 or 1")
        if (i, j) in seen:
            raise SchemaViolation(f"pairs[{k}]", f"pair ({i}, {j}) listed twice")
        seen.add((i, j))
        if v:
            similar.add((i, j))
    return SimilarityMatrix(n, frozenset(similar), source)


def load_similarity(path: str | Path) -> SimilarityMatrix:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaViolation("$", f"invalid JSON: {exc}") from exc
    return similarity_from_dict(data)
