"""Constraint validation and allocation-quality metrics."""

from __future__ import annotations

import math
import statistics
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence, Union

from slicekit.domain import Assignment, Scenario
from slicekit.errors import EmptyAssignment, EmptyInput


@dataclass(frozen=True)
class CapacityExceeded:
    slice_id: str
    used: int
    capacity: int


@dataclass(frozen=True)
class LatencyMismatch:
    request_id: str
    slice_id: str
    required_ms: float
    offered_ms: float


@dataclass(frozen=True)
class Unassigned:
    request_id: str


@dataclass(frozen=True)
class UnknownSlice:
    slice_id: str
    request_id: str


@dataclass(frozen=True)
class UnknownRequest:
    request_id: str


@dataclass(frozen=True)
class UnitsMismatch:
    request_id: str
    allocated: int
    demand: int


@dataclass(frozen=True)
class DuplicateAssignment:
    request_id: str


Violation = Union[
    CapacityExceeded,
    LatencyMismatch,
    Unassigned,
    UnknownSlice,
    UnknownRequest,
    UnitsMismatch,
    DuplicateAssignment,
]


@dataclass(frozen=True)
class ViolationReport:
    violations: tuple[Violation, ...] = ()

    def __len__(self) -> int:
        return len(self.violations)

    def __bool__(self) -> bool:
        return bool(self.violations)

    def of_kind(self, kind: type) -> list[Violation]:
        return [v for v in self.violations if isinstance(v, kind)]

    def to_list(self) -> list[dict[str, Any]]:
        return [{"kind": type(v).__name__, **asdict(v)} for v in self.violations]


def validate(scenario: Scenario, assignment: Assignment) -> ViolationReport:
    """Check every row against the scenario and report all breaches found.

    Capacity is charged with the allocated units written in the rows, so a
    draft that under-reports its units is flagged for the units, not capacity.
    """
    slices = {s.id: s for s in scenario.slices}
    requests = {r.id: r for r in scenario.requests}
    found: list[Violation] = []
    used: dict[str, int] = defaultdict(int)
    seen: set[str] = set()
    for row in assignment.rows:
        if row.request_id in seen:
            found.append(DuplicateAssignment(row.request_id))
        seen.add(row.request_id)
        s = slices.get(row.slice_id)
        r = requests.get(row.request_id)
        if s is None:
            found.append(UnknownSlice(row.slice_id, row.request_id))
        if r is None:
            found.append(UnknownRequest(row.request_id))
        if s is None:
            continue
        used[s.id] += row.allocated_units
        if r is None:
            continue
        if s.latency_guarantee_ms > r.latency_req_ms:
            found.append(LatencyMismatch(r.id, s.id, r.latency_req_ms, s.latency_guarantee_ms))
        if row.allocated_units != r.demand:
            found.append(UnitsMismatch(r.id, row.allocated_units, r.demand))
    for s in scenario.slices:
        if used[s.id] > s.capacity:
            found.append(CapacityExceeded(s.id, used[s.id], s.capacity))
    for r in scenario.requests:
        if r.id not in seen:
            found.append(Unassigned(r.id))
    return ViolationReport(tuple(found))


def completeness(scenario: Scenario, assignment: Assignment) -> float:
    """Percentage of the scenario's requests that appear in the assignment."""
    if scenario.n == 0:
        return 100.0
    known = {r.id for r in scenario.requests}
    placed = {row.request_id for row in assignment.rows} & known
    return 100.0 * len(placed) / scenario.n


def _entropy(counts: Sequence[int]) -> float:
    total = sum(counts)
    return -sum(c / total * math.log(c / total) for c in counts if c)


def homogeneity(scenario: Scenario, assignment: Assignment) -> float:
    """Entropy-based purity of slices w.r.t. request archetypes, in [0, 1].

    h = 1 - H(class | slice) / H(class), natural log, over assigned requests
    only; 1.0 when all assigned requests share one archetype.
    """
    archetype = {r.id: r.archetype for r in scenario.requests}
    labelled = [(row.slice_id, archetype[row.request_id]) for row in assignment.rows if row.request_id in archetype]
    if not labelled:
        raise EmptyAssignment("homogeneity needs at least one assigned request")
    h_class = _entropy(list(Counter(c for _, c in labelled).values()))
    if h_class == 0.0:
        return 1.0
    n = len(labelled)
    by_slice: dict[str, Counter] = defaultdict(Counter)
    for sid, c in labelled:
        by_slice[sid][c] += 1
    h_cond = sum(sum(cnt.values()) / n * _entropy(list(cnt.values())) for cnt in by_slice.values())
    return min(1.0, max(0.0, 1.0 - h_cond / h_class))


def utilizations(scenario: Scenario, assignment: Assignment) -> dict[str, tuple[float, float]]:
    """Per slice id: (allocated units / capacity, assigned rows / connection capacity).

    Values above 1 are reported unclamped. A zero-capacity slice reads 0.0
    when empty and +inf once anything is allocated to it.
    """
    units: dict[str, int] = defaultdict(int)
    rows: dict[str, int] = defaultdict(int)
    for row in assignment.rows:
        units[row.slice_id] += row.allocated_units
        rows[row.slice_id] += 1
    out = {}
    for s in scenario.slices:
        if s.capacity:
            bw = units[s.id] / s.capacity
        else:
            bw = math.inf if units[s.id] else 0.0
        out[s.id] = (bw, rows[s.id] / s.connection_capacity)
    return out


@dataclass(frozen=True)
class MetricsReport:
    completeness_pct: float
    homogeneity: float | None
    bandwidth_utilization: dict[str, float]
    density_utilization: dict[str, float]
    violation_count: int

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "MetricsReport":
        return cls(
            float(data["completeness_pct"]),
            None if data.get("homogeneity") is None else float(data["homogeneity"]),
            {k: float(v) for k, v in data["bandwidth_utilization"].items()},
            {k: float(v) for k, v in data["density_utilization"].items()},
            int(data["violation_count"]),
        )

    def csv_row(self) -> dict[str, Any]:
        row: dict[str, Any] = {
            "completeness_pct": f"{self.completeness_pct:.4f}",
            "homogeneity": "" if self.homogeneity is None else f"{self.homogeneity:.6f}",
            "violation_count": self.violation_count,
        }
        for sid, v in self.bandwidth_utilization.items():
            row[f"bandwidth_{sid}"] = f"{v:.6f}"
        for sid, v in self.density_utilization.items():
            row[f"density_{sid}"] = f"{v:.6f}"
        return row


def metrics(scenario: Scenario, assignment: Assignment, report: ViolationReport | None = None) -> MetricsReport:
    report = validate(scenario, assignment) if report is None else report
    util = utilizations(scenario, assignment)
    try:
        h = homogeneity(scenario, assignment)
    except EmptyAssignment:
        h = None
    return MetricsReport(
        completeness(scenario, assignment),
        h,
        {sid: bw for sid, (bw, _) in util.items()},
        {sid: den for sid, (_, den) in util.items()},
        len(report),
    )


@dataclass(frozen=True)
class Stat:
    mean: float
    std: float
    n: int

    def __str__(self) -> str:
        return f"{self.mean:.2f} ± {self.std:.2f}"


def _stat(values: list[float]) -> Stat:
    mean = statistics.fmean(values)
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return Stat(mean, std, len(values))


@dataclass(frozen=True)
class Aggregate:
    runs: int
    completeness_pct: Stat
    homogeneity: Stat | None
    violation_count: Stat
    bandwidth_utilization: dict[str, Stat] = field(default_factory=dict)
    density_utilization: dict[str, Stat] = field(default_factory=dict)


def aggregate(runs: Sequence[MetricsReport]) -> Aggregate:
    """Mean and sample standard deviation (n - 1) of every metric; std is 0 for one run.

    Runs without a homogeneity value are left out of that metric only.
    """
    if not runs:
        raise EmptyInput("aggregate needs at least one run")
    h_values = [r.homogeneity for r in runs if r.homogeneity is not None]
    slice_ids = list(dict.fromkeys(sid for r in runs for sid in r.bandwidth_utilization))
    return Aggregate(
        len(runs),
        _stat([r.completeness_pct for r in runs]),
        _stat(h_values) if h_values else None,
        _stat([float(r.violation_count) for r in runs]),
        {sid: _stat([r.bandwidth_utilization.get(sid, 0.0) for r in runs]) for sid in slice_ids},
        {sid: _stat([r.density_utilization.get(sid, 0.0) for r in runs]) for sid in slice_ids},
    )
