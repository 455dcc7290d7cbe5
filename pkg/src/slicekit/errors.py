"""Exception hierarchy shared across slicekit."""

from __future__ import annotations


class SlicekitError(Exception):
    """Base class for every error raised by slicekit."""


class InvalidScenario(SlicekitError, ValueError):
    """A domain value violates a construction-time invariant."""


class DimensionMismatch(SlicekitError, ValueError):
    pass


class ConfigInvalid(SlicekitError, ValueError):
    pass


class SchemaViolation(SlicekitError, ValueError):
    """A persisted file does not match its schema.

    ``field`` holds a dotted path to the offending value, e.g. ``requests[3].demand``.
    """

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


class InstanceTooLarge(SlicekitError, ValueError):
    pass


class EmptyAssignment(SlicekitError, ValueError):
    pass


class EmptyInput(SlicekitError, ValueError):
    pass


class GatewayError(SlicekitError):
    """Transport-level failure talking to a chat-completion provider."""


class ParseError(SlicekitError, ValueError):
    """Base for failures to parse an LLM assignment response."""


class NoCodeBlock(ParseError):
    def __init__(self) -> None:
        super().__init__("response contains no triple-backtick block")


class BadFieldCount(ParseError):
    def __init__(self, line_no: int, found: int) -> None:
        super().__init__(f"line {line_no}: expected 3 '@'-separated fields, found {found}")
        self.line_no = line_no
        self.found = found


class BadInteger(ParseError):
    def __init__(self, line_no: int, value: str) -> None:
        super().__init__(f"line {line_no}: allocated units {value!r} is not a non-negative integer")
        self.line_no = line_no
        self.value = value


class DuplicateRequest(ParseError):
    def __init__(self, request_id: str, line_no: int | None = None) -> None:
        where = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{where}request {request_id!r} assigned more than once")
        self.request_id = request_id
        self.line_no = line_no
