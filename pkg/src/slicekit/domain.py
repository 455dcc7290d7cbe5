"""Core value types: slices, requests, scenarios, similarity and assignments.

All types are frozen dataclasses validated on construction. Resource units
(capacities and demands) are plain integers; latencies are milliseconds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Mapping

from slicekit.errors import DuplicateRequest, InvalidScenario


class SliceClass(str, enum.Enum):
    EMBB = "EMBB"
    URLLC = "URLLC"
    MMTC = "MMTC"


class SimilaritySource(str, enum.Enum):
    LLM = "LLM"
    HEURISTIC_BASELINE = "HEURISTIC_BASELINE"
    EXPLICIT = "EXPLICIT"


def _is_int(value: object) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_positive_real(value: object) -> bool:
    return (
        isinstance(value, (int, float))
        and not isinstance(value, bool)
        and math.isfinite(value)
        and value > 0
    )


@dataclass(frozen=True)
class Slice:
    id: str
    slice_class: SliceClass
    capacity: int
    latency_guarantee_ms: float
    connection_capacity: int

    def __post_init__(self) -> None:
        if not self.id:
            raise InvalidScenario("slice id must be non-empty")
        object.__setattr__(self, "slice_class", SliceClass(self.slice_class))
        if not _is_int(self.capacity) or self.capacity < 0:
            raise InvalidScenario(f"slice {self.id}: capacity must be an integer >= 0")
        if not _is_positive_real(self.latency_guarantee_ms):
            raise InvalidScenario(f"slice {self.id}: latency guarantee must be > 0")
        if not _is_int(self.connection_capacity) or self.connection_capacity < 1:
            raise InvalidScenario(f"slice {self.id}: connection capacity must be an integer >= 1")


@dataclass(frozen=True)
class Request:
    id: str
    demand: int
    latency_req_ms: float
    archetype: SliceClass
    description: str = ""

    def __post_init__(self) -> None:
        if not self.id:
            raise InvalidScenario("request id must be non-empty")
        object.__setattr__(self, "archetype", SliceClass(self.archetype))
        if not _is_int(self.demand) or self.demand < 1:
            raise InvalidScenario(f"request {self.id}: demand must be an integer >= 1")
        if not _is_positive_real(self.latency_req_ms):
            raise InvalidScenario(f"request {self.id}: latency requirement must be > 0")


@dataclass(frozen=True)
class Scenario:
    """A fixed slice set plus the batch of requests to place on it.

    Construction fails with :class:`InvalidScenario` when ids collide or a
    request has no slice whose latency guarantee it can accept.
    """

    slices: tuple[Slice, ...]
    requests: tuple[Request, ...]
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "slices", tuple(self.slices))
        object.__setattr__(self, "requests", tuple(self.requests))
        if not self.slices:
            raise InvalidScenario("a scenario needs at least one slice")
        if not _is_int(self.seed) or not 0 <= self.seed < 2**64:
            raise InvalidScenario("seed must be an unsigned 64-bit integer")
        _check_unique([s.id for s in self.slices], "slice")
        _check_unique([r.id for r in self.requests], "request")
        best = min(s.latency_guarantee_ms for s in self.slices)
        for r in self.requests:
            if best > r.latency_req_ms:
                raise InvalidScenario(
                    f"request {r.id} tolerates {r.latency_req_ms} ms but the fastest slice "
                    f"guarantees {best} ms"
                )

    @property
    def n(self) -> int:
        return len(self.requests)

    @property
    def m(self) -> int:
        return len(self.slices)

    def slice_index(self) -> dict[str, int]:
        return {s.id: k for k, s in enumerate(self.slices)}

    def request_index(self) -> dict[str, int]:
        return {r.id: k for k, r in enumerate(self.requests)}


def _check_unique(ids: list[str], what: str) -> None:
    seen: set[str] = set()
    for ident in ids:
        if ident in seen:
            raise InvalidScenario(f"duplicate {what} id {ident!r}")
        seen.add(ident)


def latency_feasibility_mask(scenario: Scenario) -> list[list[bool]]:
    """Row i, column m is True iff slice m's latency guarantee is within request i's limit."""
    return [
        [s.latency_guarantee_ms <= r.latency_req_ms for s in scenario.slices]
        for r in scenario.requests
    ]


@dataclass(frozen=True)
class SimilarityMatrix:
    """Binary pairwise similarity over request indices.

    Only the pairs with value 1 are stored, as ``(i, j)`` with ``i < j``; every
    other off-diagonal pair is 0 and the diagonal reads as 1.
    """

    n: int
    similar: frozenset[tuple[int, int]] = field(default_factory=frozenset)
    source: SimilaritySource = SimilaritySource.EXPLICIT

    def __post_init__(self) -> None:
        if not _is_int(self.n) or self.n < 0:
            raise InvalidScenario("similarity matrix size must be a non-negative integer")
        object.__setattr__(self, "source", SimilaritySource(self.source))
        pairs = frozenset(self.similar)
        for i, j in pairs:
            if not (0 <= i < j < self.n):
                raise InvalidScenario(f"pair ({i}, {j}) is not an ordered pair below n={self.n}")
        object.__setattr__(self, "similar", pairs)

    @classmethod
    def from_entries(
        cls,
        n: int,
        entries: Mapping[tuple[int, int], int] | Iterable[tuple[int, int, int]],
        source: SimilaritySource = SimilaritySource.EXPLICIT,
    ) -> "SimilarityMatrix":
        items = entries.items() if isinstance(entries, Mapping) else (((i, j), v) for i, j, v in entries)
        similar = set()
        for (i, j), v in items:
            if v not in (0, 1) or isinstance(v, bool):
                raise InvalidScenario(f"pair ({i}, {j}): value {v!r} is not 0 or 1")
            a, b = (i, j) if i < j else (j, i)
            if a == b:
                raise InvalidScenario(f"diagonal entry ({i}, {j}) cannot be stored")
            if v == 1:
                similar.add((a, b))
        return cls(n, frozenset(similar), source)

    def __call__(self, i: int, j: int) -> int:
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexError(f"({i}, {j}) outside a {self.n}x{self.n} matrix")
        if i == j:
            return 1
        return 1 if ((i, j) if i < j else (j, i)) in self.similar else 0

    def pairs(self) -> Iterator[tuple[int, int, int]]:
        """Every unordered pair in lexicographic order, with its value."""
        for i, j in combinations(range(self.n), 2):
            yield i, j, 1 if (i, j) in self.similar else 0

    def with_value(self, i: int, j: int, value: int) -> "SimilarityMatrix":
        a, b = (i, j) if i < j else (j, i)
        similar = set(self.similar)
        if value:
            similar.add((a, b))
        else:
            similar.discard((a, b))
        return SimilarityMatrix(self.n, frozenset(similar), self.source)


@dataclass(frozen=True)
class AssignmentRow:
    slice_id: str
    request_id: str
    allocated_units: int

    def __post_init__(self) -> None:
        if not _is_int(self.allocated_units) or self.allocated_units < 0:
            raise InvalidScenario(
                f"request {self.request_id}: allocated units must be a non-negative integer"
            )


@dataclass(frozen=True)
class Assignment:
    rows: tuple[AssignmentRow, ...] = ()

    def __post_init__(self) -> None:
        rows = tuple(self.rows)
        seen: set[str] = set()
        for row in rows:
            if row.request_id in seen:
                raise DuplicateRequest(row.request_id)
            seen.add(row.request_id)
        object.__setattr__(self, "rows", rows)

    def __len__(self) -> int:
        return len(self.rows)

    def slice_of(self) -> dict[str, str]:
        return {row.request_id: row.slice_id for row in self.rows}

    @classmethod
    def from_vector(cls, scenario: Scenario, vector: Iterable[int]) -> "Assignment":
        """Full-demand assignment from a per-request slice index vector (request order)."""
        return cls(
            tuple(
                AssignmentRow(scenario.slices[m].id, r.id, r.demand)
                for r, m in zip(scenario.requests, vector)
            )
        )


@dataclass(frozen=True)
class IlpFormulation:
    """The similarity-maximising assignment model for one scenario.

    ``allowed[i][m]`` fixes x[i, m] to 0 where False. ``pair_vars`` lists the
    similar pairs that share at least one allowed slice; ``objective_terms``
    expands them to every (i, j, m) with m allowed for both.
    """

    allowed: tuple[tuple[bool, ...], ...]
    pair_vars: tuple[tuple[int, int], ...]
    objective_terms: tuple[tuple[int, int, int], ...]

    @property
    def n(self) -> int:
        return len(self.allowed)
