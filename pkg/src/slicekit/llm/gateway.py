"""Zero-shot slice assignment: render, call, parse, retry on malformed output."""

from __future__ import annotations

import logging

from slicekit.domain import Assignment, Scenario
from slicekit.errors import ParseError
from slicekit.llm.parsing import parse_assignment_response
from slicekit.llm.prompts import render_assignment_prompt, with_format_reminder
from slicekit.llm.providers import ChatProvider

log = logging.getLogger(__name__)


def zero_shot_assign(
    scenario: Scenario,
    provider: ChatProvider,
    shuffle_seed: int,
    *,
    temperature: float = 0.8,
    max_retries: int = 2,
) -> Assignment:
    """Ask the provider for a complete assignment in one shot.

    The parsed draft is returned as-is, even if it breaks capacity or latency
    rules. After a parse failure the prompt is re-sent with a format reminder,
    up to ``max_retries`` times; the last :class:`ParseError` is then raised.
    :class:`GatewayError` from the provider propagates immediately.
    """
    bundle = render_assignment_prompt(scenario, shuffle_seed)
    prompt = bundle
    for attempt in range(max_retries + 1):
        text = provider.chat(prompt.system_text, prompt.user_text, temperature)
        try:
            return parse_assignment_response(text)
        except ParseError as exc:
            log.info("attempt %d: unparseable response (%s)", attempt + 1, exc)
            if attempt == max_retries:
                raise
            prompt = with_format_reminder(bundle, exc)
    raise AssertionError("unreachable")
