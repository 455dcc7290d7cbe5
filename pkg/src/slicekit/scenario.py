"""Seeded synthetic scenario generation and JSON persistence."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from slicekit.domain import Request, Scenario, Slice, SliceClass
from slicekit.errors import ConfigInvalid, SchemaViolation

CLASS_ORDER = (SliceClass.EMBB, SliceClass.URLLC, SliceClass.MMTC)
SLICE_IDS = ("SliceA", "SliceB", "SliceC")

DESCRIPTIONS = {
    SliceClass.EMBB: (
        "4K video streaming session",
        "cloud gaming stream",
        "VR live event broadcast",
        "large file download",
        "HD video conference",
    ),
    SliceClass.URLLC: (
        "factory robot control loop",
        "remote surgery haptic feedback",
        "vehicle collision avoidance messaging",
        "smart grid protection signalling",
        "drone flight control link",
    ),
    SliceClass.MMTC: (
        "soil moisture sensor uplink",
        "smart meter reading",
        "parking occupancy sensor report",
        "asset tracking beacon",
        "environmental air quality sensor",
    ),
}


@dataclass(frozen=True)
class SliceTemplate:
    capacity: int
    latency_ms: float
    connections: int


def _default_slices() -> dict[SliceClass, SliceTemplate]:
    return {
        SliceClass.EMBB: SliceTemplate(100, 50.0, 20),
        SliceClass.URLLC: SliceTemplate(30, 5.0, 15),
        SliceClass.MMTC: SliceTemplate(60, 100.0, 40),
    }


def _default_demands() -> dict[SliceClass, tuple[int, int]]:
    return {SliceClass.EMBB: (8, 15), SliceClass.URLLC: (1, 3), SliceClass.MMTC: (1, 2)}


def _default_latencies() -> dict[SliceClass, tuple[float, float]]:
    return {
        SliceClass.EMBB: (50.0, 150.0),
        SliceClass.URLLC: (5.0, 10.0),
        SliceClass.MMTC: (50.0, 200.0),
    }


@dataclass(frozen=True)
class GeneratorConfig:
    """Everything :func:`generate` needs; the scenario is a pure function of it."""

    seed: int = 0
    n_requests: int = 30
    archetype_mix: tuple[float, float, float] = (0.3, 0.3, 0.4)
    slice_template: dict[SliceClass, SliceTemplate] = field(default_factory=_default_slices)
    demand_ranges: dict[SliceClass, tuple[int, int]] = field(default_factory=_default_demands)
    latency_ranges: dict[SliceClass, tuple[float, float]] = field(default_factory=_default_latencies)

    def validate(self) -> None:
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigInvalid("seed must be an unsigned 64-bit integer")
        if not isinstance(self.n_requests, int) or self.n_requests < 0:
            raise ConfigInvalid("n_requests must be a non-negative integer")
        mix = self.archetype_mix
        if len(mix) != 3 or any(not math.isfinite(w) or w < 0 for w in mix):
            raise ConfigInvalid("archetype_mix needs three finite non-negative weights")
        if sum(mix) <= 0:
            raise ConfigInvalid("archetype_mix weights are all zero")
        for cls in CLASS_ORDER:
            if cls not in self.slice_template:
                raise ConfigInvalid(f"slice_template is missing {cls.value}")
            lo, hi = self.demand_ranges.get(cls, (1, 0))
            if not (isinstance(lo, int) and isinstance(hi, int)) or lo < 1 or lo > hi:
                raise ConfigInvalid(f"demand range for {cls.value} is empty or invalid: {lo}..{hi}")
            llo, lhi = self.latency_ranges.get(cls, (1.0, 0.0))
            if not (0 < llo <= lhi) or not math.isfinite(lhi):
                raise ConfigInvalid(f"latency range for {cls.value} is empty or invalid: {llo}..{lhi}")
        fastest = min(t.latency_ms for t in self.slice_template.values())
        for cls, w in zip(CLASS_ORDER, mix):
            if w > 0 and self.latency_ranges[cls][0] < fastest:
                raise ConfigInvalid(
                    f"{cls.value} latencies start at {self.latency_ranges[cls][0]} ms, below the "
                    f"fastest slice ({fastest} ms); some requests would have no compatible slice"
                )

    def to_dict(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "n_requests": self.n_requests,
            "archetype_mix": list(self.archetype_mix),
            "slice_template": {
                c.value: {"capacity": t.capacity, "latency_ms": t.latency_ms, "connections": t.connections}
                for c, t in self.slice_template.items()
            },
            "demand_ranges": {c.value: list(r) for c, r in self.demand_ranges.items()},
            "latency_ranges": {c.value: list(r) for c, r in self.latency_ranges.items()},
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "GeneratorConfig":
        """Build from a (possibly partial) dict; omitted keys keep their defaults."""
        base = cls()
        try:
            slices = dict(base.slice_template)
            for name, t in data.get("slice_template", {}).items():
                slices[SliceClass(name)] = SliceTemplate(
                    int(t["capacity"]), float(t["latency_ms"]), int(t["connections"])
                )
            demands = dict(base.demand_ranges)
            for name, (lo, hi) in data.get("demand_ranges", {}).items():
                demands[SliceClass(name)] = (lo, hi)
            latencies = dict(base.latency_ranges)
            for name, (lo, hi) in data.get("latency_ranges", {}).items():
                latencies[SliceClass(name)] = (float(lo), float(hi))
            config = cls(
                seed=data.get("seed", base.seed),
                n_requests=data.get("n_requests", base.n_requests),
                archetype_mix=tuple(float(w) for w in data.get("archetype_mix", base.archetype_mix)),
                slice_template=slices,
                demand_ranges=demands,
                latency_ranges=latencies,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigInvalid(f"malformed generator config: {exc}") from exc
        config.validate()
        return config


def archetype_quotas(mix: tuple[float, float, float], n: int) -> list[int]:
    """Split n into per-archetype counts proportional to mix (largest remainder)."""
    total = sum(mix)
    exact = [w / total * n for w in mix]
    counts = [math.floor(x) for x in exact]
    by_remainder = sorted(range(3), key=lambda k: (-(exact[k] - counts[k]), k))
    for k in by_remainder[: n - sum(counts)]:
        counts[k] += 1
    return counts


def generate(config: GeneratorConfig) -> Scenario:
    """Draw a scenario with SliceA/B/C (eMBB, URLLC, mMTC) and ``n_requests`` requests.

    Archetypes are drawn without replacement from an urn holding the
    largest-remainder quota of the mix, so class counts are exact while their
    order is random. Per request the draws are archetype, demand, latency.
    """
    config.validate()
    rng = np.random.Generator(np.random.PCG64(config.seed))
    slices = tuple(
        Slice(sid, cls, t.capacity, t.latency_ms, t.connections)
        for sid, cls in zip(SLICE_IDS, CLASS_ORDER)
        for t in [config.slice_template[cls]]
    )
    urn = archetype_quotas(config.archetype_mix, config.n_requests)
    requests = []
    for i in range(config.n_requests):
        ticket = int(rng.integers(sum(urn)))
        k = 0
        while ticket >= urn[k]:
            ticket -= urn[k]
            k += 1
        urn[k] -= 1
        cls = CLASS_ORDER[k]
        lo, hi = config.demand_ranges[cls]
        demand = int(rng.integers(lo, hi + 1))
        llo, lhi = config.latency_ranges[cls]
        latency = min(max(round(float(rng.uniform(llo, lhi)), 1), llo), lhi)
        templates = DESCRIPTIONS[cls]
        description = f"{templates[i % len(templates)]} {i + 1}"
        requests.append(Request(f"Request{i + 1}", demand, latency, cls, description))
    return Scenario(slices, tuple(requests), config.seed)


def scenario_to_dict(scenario: Scenario) -> dict[str, Any]:
    return {
        "seed": scenario.seed,
        "slices": [
            {
                "id": s.id,
                "class": s.slice_class.value,
                "capacity": s.capacity,
                "latency_ms": s.latency_guarantee_ms,
                "connections": s.connection_capacity,
            }
            for s in scenario.slices
        ],
        "requests": [
            {
                "id": r.id,
                "demand": r.demand,
                "latency_ms": r.latency_req_ms,
                "archetype": r.archetype.value,
                "description": r.description,
            }
            for r in scenario.requests
        ],
    }


def dumps_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario_to_dict(scenario), indent=2, allow_nan=False, ensure_ascii=False) + "\n"


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    Path(path).write_text(dumps_scenario(scenario), encoding="utf-8")


def _field(obj: dict, key: str, where: str, kind: str) -> Any:
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaViolation(f"{where}.{key}" if where else key, "missing")
    value = obj[key]
    path = f"{where}.{key}" if where else key
    if kind == "str":
        if not isinstance(value, str) or not value:
            raise SchemaViolation(path, "must be a non-empty string")
    elif kind == "uint":
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise SchemaViolation(path, "must be a non-negative integer")
    elif kind == "pos_int":
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise SchemaViolation(path, "must be a positive integer")
    elif kind == "pos_real":
        if (
            isinstance(value, bool)
            or not isinstance(value, (int, float))
            or not math.isfinite(value)
            or value <= 0
        ):
            raise SchemaViolation(path, "must be a positive finite number")
        value = float(value)
    elif kind == "class":
        try:
            value = SliceClass(value)
        except ValueError:
            raise SchemaViolation(path, f"must be one of {[c.value for c in SliceClass]}") from None
    return value


def scenario_from_dict(data: Any) -> Scenario:
    if not isinstance(data, dict):
        raise SchemaViolation("$", "top level must be an object")
    seed = _field(data, "seed", "", "uint")
    if seed >= 2**64:
        raise SchemaViolation("seed", "must fit in 64 bits")
    raw_slices = data.get("slices")
    raw_requests = data.get("requests")
    if not isinstance(raw_slices, list):
        raise SchemaViolation("slices", "must be a list")
    if not isinstance(raw_requests, list):
        raise SchemaViolation("requests", "must be a list")
    slices = []
    for k, s in enumerate(raw_slices):
        where = f"slices[{k}]"
        slices.append(
            Slice(
                _field(s, "id", where, "str"),
                _field(s, "class", where, "class"),
                _field(s, "capacity", where, "uint"),
                _field(s, "latency_ms", where, "pos_real"),
                _field(s, "connections", where, "pos_int"),
            )
        )
    requests = []
    for k, r in enumerate(raw_requests):
        where = f"requests[{k}]"
        description = r.get("description", "") if isinstance(r, dict) else ""
        if not isinstance(description, str):
            raise SchemaViolation(f"{where}.description", "must be a string")
        requests.append(
            Request(
                _field(r, "id", where, "str"),
                _field(r, "demand", where, "pos_int"),
                _field(r, "latency_ms", where, "pos_real"),
                _field(r, "archetype", where, "class"),
                description,
            )
        )
    return Scenario(tuple(slices), tuple(requests), seed)


def load_scenario(path: str | Path) -> Scenario:
    """Read a scenario file.

    Raises OSError when unreadable, :class:`SchemaViolation` on malformed
    content and :class:`InvalidScenario` when a request has no compatible slice.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise SchemaViolation("$", f"invalid JSON: {exc}") from exc
    return scenario_from_dict(data)


def _reject_constant(name: str) -> float:
    raise SchemaViolation("$", f"non-finite number {name} is not allowed")
