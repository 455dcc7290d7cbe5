"""Strict parsing of '@'-delimited LLM responses, and the inverse serializer."""

from __future__ import annotations

import re
from typing import Iterable

from slicekit.domain import Assignment, AssignmentRow
from slicekit.errors import BadFieldCount, BadInteger, DuplicateRequest, NoCodeBlock

FENCE = "```"
_UINT = re.compile(r"[0-9]+")


def first_code_block(text: str) -> str | None:
    """Body of the first triple-backtick block, without an info string, or None."""
    start = text.find(FENCE)
    if start < 0:
        return None
    end = text.find(FENCE, start + len(FENCE))
    if end < 0:
        return None
    body = text[start + len(FENCE) : end]
    first_nl = body.find("\n")
    if first_nl >= 0 and "@" not in body[:first_nl]:
        # opening line holds only an info string such as "csv"
        body = body[first_nl + 1 :]
    return body


def parse_assignment_response(text: str) -> Assignment:
    """Parse the first fenced block into an :class:`Assignment`.

    Each non-empty line must be ``slice@request@units``; whitespace around
    fields is ignored and both LF and CRLF line endings are accepted. Line
    numbers in errors count from 1 within the block.
    """
    body = first_code_block(text)
    if body is None:
        raise NoCodeBlock()
    rows = []
    seen: set[str] = set()
    for line_no, raw in enumerate(body.split("\n"), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split("@")]
        if len(fields) != 3 or not fields[0] or not fields[1]:
            raise BadFieldCount(line_no, len(fields))
        slice_id, request_id, units = fields
        if not _UINT.fullmatch(units):
            raise BadInteger(line_no, units)
        if request_id in seen:
            raise DuplicateRequest(request_id, line_no)
        seen.add(request_id)
        rows.append(AssignmentRow(slice_id, request_id, int(units)))
    return Assignment(tuple(rows))


def serialize_assignment(assignment: Assignment) -> str:
    lines = [f"{r.slice_id}@{r.request_id}@{r.allocated_units}" for r in assignment.rows]
    return FENCE + "\n" + "".join(line + "\n" for line in lines) + FENCE


_JUDGMENT = re.compile(r"\s*(\d+)\s*@\s*(\d+)\s*@\s*(\S+)\s*")


def parse_similarity_response(text: str, pairs: Iterable[tuple[int, int]]) -> dict[tuple[int, int], int]:
    """Collect the well-formed judgments for the requested pairs.

    Lines that do not parse, judge an unrequested pair, or carry a score other
    than 0/1 are dropped; callers decide how to fill the gaps.
    """
    wanted = {(min(i, j), max(i, j)) for i, j in pairs}
    body = first_code_block(text)
    if body is None:
        return {}
    found: dict[tuple[int, int], int] = {}
    for line in body.splitlines():
        match = _JUDGMENT.fullmatch(line)
        if not match:
            continue
        i, j, score = int(match[1]), int(match[2]), match[3]
        key = (min(i, j), max(i, j))
        if key in wanted and score in ("0", "1") and key not in found:
            found[key] = int(score)
    return found
