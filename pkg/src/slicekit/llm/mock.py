"""Deterministic rule-based stand-ins for an LLM.

Every mock reads the prompt it is given, exactly as a model would, and looks
the listed requests up in the scenario it was built with. Assignment prompts
are answered by a placement policy; similarity prompts by archetype equality.
"""

from __future__ import annotations

import re
import threading

from slicekit.domain import Request, Scenario
from slicekit.llm.prompts import PAIRS_HEADER, REQUESTS_HEADER

_REQUEST_LINE = re.compile(r"^- (.+?): demand \d+ units", re.M)
_PAIR_LINE = re.compile(r"^(\d+)@(\d+)$")


def _section(text: str, header: str) -> list[str]:
    start = text.find(header + "\n")
    if start < 0:
        return []
    lines = []
    for line in text[start + len(header) + 1 :].split("\n"):
        if not line.strip():
            break
        lines.append(line)
    return lines


class MockProvider:
    """Base class: subclasses implement :meth:`place` for one request."""

    name = "mock"

    def __init__(self, scenario: Scenario, corrupt_pairs: set[tuple[int, int]] | None = None) -> None:
        self.scenario = scenario
        self.corrupt_pairs = {(min(p), max(p)) for p in corrupt_pairs or ()}
        self.calls: list[tuple[str, str, float]] = []
        self.judged_pairs: list[tuple[int, int]] = []
        self._by_id = {r.id: r for r in scenario.requests}
        self._lock = threading.Lock()

    def chat(self, system: str, user: str, temperature: float) -> str:
        with self._lock:
            self.calls.append((system, user, temperature))
        if PAIRS_HEADER in user:
            return self._judge(user)
        return self._assign(user)

    def place(self, request: Request) -> int | None:
        raise NotImplementedError

    def listed_requests(self, user: str) -> list[Request]:
        lines = "\n".join(_section(user, REQUESTS_HEADER))
        return [self._by_id[rid] for rid in _REQUEST_LINE.findall(lines) if rid in self._by_id]

    def rows(self, requests: list[Request]) -> list[str]:
        lines = []
        for r in requests:
            m = self.place(r)
            if m is not None:
                lines.append(f"{self.scenario.slices[m].id}@{r.id}@{r.demand}")
        return lines

    def _assign(self, user: str) -> str:
        lines = self.rows(self.listed_requests(user))
        return "Here is the allocation:\n```\n" + "\n".join(lines) + "\n```\n"

    def _judge(self, user: str) -> str:
        lines = []
        for raw in _section(user, PAIRS_HEADER):
            match = _PAIR_LINE.match(raw.strip())
            if not match:
                continue
            i, j = int(match[1]), int(match[2])
            with self._lock:
                self.judged_pairs.append((i, j))
            if (min(i, j), max(i, j)) in self.corrupt_pairs:
                lines.append(f"{i}@{j}@maybe")
                continue
            same = self.scenario.requests[i].archetype == self.scenario.requests[j].archetype
            lines.append(f"{i}@{j}@{int(same)}")
        return "```\n" + "\n".join(lines) + "\n```"

    def _compatible(self, r: Request) -> list[int]:
        return [
            m for m, s in enumerate(self.scenario.slices) if s.latency_guarantee_ms <= r.latency_req_ms
        ]


class GreedyByClassMock(MockProvider):
    """Each request goes to the first slice provisioned for its archetype."""

    name = "greedy-by-class"

    def place(self, request: Request) -> int | None:
        for m, s in enumerate(self.scenario.slices):
            if s.slice_class == request.archetype:
                return m
        compatible = self._compatible(request)
        return compatible[0] if compatible else 0


class TruncatorMock(GreedyByClassMock):
    """Like greedy-by-class, but drops the last request listed in the prompt."""

    name = "truncator"

    def rows(self, requests: list[Request]) -> list[str]:
        return super().rows(requests)[:-1]


class CapacityBlindMock(MockProvider):
    """Latency-aware but ignores capacity: always the biggest compatible slice."""

    name = "capacity-blind"

    def place(self, request: Request) -> int | None:
        compatible = self._compatible(request)
        return max(compatible, key=lambda m: (self.scenario.slices[m].capacity, -m))


class GarbageMock(MockProvider):
    """Never produces a fenced block; exercises retry exhaustion."""

    name = "garbage"

    def chat(self, system: str, user: str, temperature: float) -> str:
        with self._lock:
            self.calls.append((system, user, temperature))
        return "I would put the video streams on the broadband slice."


MOCKS: dict[str, type[MockProvider]] = {
    cls.name: cls for cls in (GreedyByClassMock, TruncatorMock, CapacityBlindMock, GarbageMock)
}


def make_mock(name: str, scenario: Scenario, **kwargs) -> MockProvider:
    try:
        return MOCKS[name](scenario, **kwargs)
    except KeyError:
        raise ValueError(f"unknown mock {name!r}; choose from {sorted(MOCKS)}") from None


__all__ = [
    "CapacityBlindMock",
    "GarbageMock",
    "GreedyByClassMock",
    "MOCKS",
    "MockProvider",
    "TruncatorMock",
    "make_mock",
]
