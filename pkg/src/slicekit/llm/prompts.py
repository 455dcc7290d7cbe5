"""Prompt rendering for zero-shot assignment and pairwise similarity judgments."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from slicekit.domain import Request, Scenario

SYSTEM_TEXT = "You are a network slicing assistant."

SLICES_HEADER = "Slice Capacities:"
REQUESTS_HEADER = "User Requests:"
PAIRS_HEADER = "Pairs to judge:"
SIM_REQUESTS_HEADER = "Requests:"

ASSIGNMENT_TEMPLATE = """\
Network slicing is the process of partitioning a physical mobile network into multiple virtual slices to meet diverse service requirements. For example, eMBB slices provide high bandwidth for video streaming, URLLC slices offer ultra-low latency for mission-critical services, and mMTC slices support massive IoT connectivity. Telecom operators typically perform slice resource allocation manually.

Assign each of the following user service requests to one of the available network slices based on these constraints:
1. The total resource demand of all requests in a slice must not exceed that slice's capacity.
2. No new slices should be added (use only the provided slices).
3. A request's latency requirement must be satisfied by the slice's latency (assign each request only to a slice with equal or lower latency than it requires).
4. All requests must be assigned to a slice (no request left unassigned).

The output should be a list of assignments in CSV format (as a data frame) enclosed in triple backticks, using the "@" symbol as a delimiter. Each line should be:

slice_id @ request_id @ allocated_units

(representing that a given request is allocated to a particular slice along with the resource units it will consume).

Example output format (for illustration, assuming slice names and request IDs):

```
SliceA@Request1@5
SliceB@Request2@10
SliceA@Request3@8
...
```

Below are the available slices and their capacities, followed by the list of user requests with their demands and latency requirements:

{slices_header}
{slices}

{requests_header}
{requests}

Ensure that your response strictly follows the format and constraints above, and nothing else."""

FORMAT_REMINDER = (
    "Your previous reply could not be parsed ({error}). Reply with only the assignment lines "
    "slice_id@request_id@allocated_units inside a single triple-backtick block, one line per request."
)

SIMILARITY_TEMPLATE = """\
Decide, for each pair of user service requests listed below, whether the two requests are similar enough to be served well by the same network slice (for example, both are high-bandwidth video streams, or both are latency-critical control traffic). Use 1 for similar and 0 for not similar.

{requests_header}
{requests}

{pairs_header}
{pairs}

Reply with exactly one line per pair, in the order given, formatted as i@j@score where score is 0 or 1, enclosed in triple backticks, and nothing else. For example, the first pair is answered with the line {first}@0 or {first}@1."""


@dataclass(frozen=True)
class PromptBundle:
    system_text: str
    user_text: str
    shuffle_seed: int = 0


def _ms(value: float) -> str:
    return f"{value:g}"


def slice_line(scenario: Scenario, m: int) -> str:
    s = scenario.slices[m]
    return f"- {s.id}: capacity {s.capacity} units, latency {_ms(s.latency_guarantee_ms)} ms"


def request_line(r: Request) -> str:
    return (
        f"- {r.id}: demand {r.demand} units, latency requirement {_ms(r.latency_req_ms)} ms, "
        f"description: {r.description}"
    )


def shuffled_order(n: int, shuffle_seed: int) -> list[int]:
    rng = np.random.Generator(np.random.PCG64(shuffle_seed))
    return [int(k) for k in rng.permutation(n)]


def render_assignment_prompt(scenario: Scenario, shuffle_seed: int) -> PromptBundle:
    """Zero-shot assignment prompt; only the request listing order depends on the seed."""
    slices = "\n".join(slice_line(scenario, m) for m in range(scenario.m))
    requests = "\n".join(request_line(scenario.requests[i]) for i in shuffled_order(scenario.n, shuffle_seed))
    user = ASSIGNMENT_TEMPLATE.format(
        slices_header=SLICES_HEADER,
        slices=slices,
        requests_header=REQUESTS_HEADER,
        requests=requests,
    )
    return PromptBundle(SYSTEM_TEXT, user, shuffle_seed)


def with_format_reminder(bundle: PromptBundle, error: Exception) -> PromptBundle:
    reminder = FORMAT_REMINDER.format(error=error)
    return PromptBundle(bundle.system_text, f"{bundle.user_text}\n\n{reminder}", bundle.shuffle_seed)


def render_similarity_prompt(
    requests: Sequence[Request], pairs: Sequence[tuple[int, int]], indices: Sequence[int] | None = None
) -> PromptBundle:
    """Ask for a 0/1 judgment on each ``(i, j)`` pair.

    ``indices`` gives the scenario index of each entry in ``requests``; by
    default ``requests`` is the full scenario list, so position is the index.
    """
    if not pairs:
        raise ValueError("a similarity prompt needs at least one pair")
    index_of = list(indices) if indices is not None else list(range(len(requests)))
    by_index = dict(zip(index_of, requests))
    needed = sorted({k for pair in pairs for k in pair})
    missing = [k for k in needed if k not in by_index]
    if missing:
        raise ValueError(f"pairs reference requests that are not listed: {missing}")
    listing = "\n".join(
        f"- {k}: {by_index[k].id}, description: {by_index[k].description}, demand "
        f"{by_index[k].demand} units, latency requirement {_ms(by_index[k].latency_req_ms)} ms"
        for k in needed
    )
    pair_lines = "\n".join(f"{i}@{j}" for i, j in pairs)
    i0, j0 = pairs[0]
    user = SIMILARITY_TEMPLATE.format(
        requests_header=SIM_REQUESTS_HEADER,
        requests=listing,
        pairs_header=PAIRS_HEADER,
        pairs=pair_lines,
        first=f"{i0}@{j0}",
    )
    return PromptBundle(SYSTEM_TEXT, user)
