import json
import random
import string

import httpx
import pytest

from slicekit.domain import Assignment, AssignmentRow
from slicekit.errors import BadFieldCount, BadInteger, ConfigInvalid, DuplicateRequest, GatewayError, NoCodeBlock
from slicekit.evaluation import completeness
from slicekit.llm import (
    HttpChatProvider,
    ProviderConfig,
    RecordingProvider,
    ReplayProvider,
    make_mock,
    parse_assignment_response,
    parse_similarity_response,
    render_assignment_prompt,
    render_similarity_prompt,
    serialize_assignment,
    zero_shot_assign,
)
from slicekit.llm.prompts import REQUESTS_HEADER, SLICES_HEADER, SYSTEM_TEXT
from slicekit.scenario import GeneratorConfig, generate


def section(text, header):
    lines = text.split(header + "\n", 1)[1].split("\n")
    return lines[: lines.index("")]


@pytest.fixture
def scen():
    return generate(GeneratorConfig(seed=5, n_requests=12))


# prompts


def test_prompt_lists_every_slice_and_request(tiny):
    b = render_assignment_prompt(tiny.__class__(tiny.slices, tiny.requests[:2]), 0)
    assert b.system_text == "You are a network slicing assistant."
    assert len(section(b.user_text, SLICES_HEADER)) == 3
    assert len(section(b.user_text, REQUESTS_HEADER)) == 2
    for rule in ("1. The total resource demand", "2. No new slices", "3. A request's latency", "4. All requests must"):
        assert rule in b.user_text


def test_shuffle_only_permutes_request_listing(scen):
    a = render_assignment_prompt(scen, 1)
    b = render_assignment_prompt(scen, 2)
    assert a.user_text != b.user_text
    assert sorted(section(a.user_text, REQUESTS_HEADER)) == sorted(section(b.user_text, REQUESTS_HEADER))
    assert section(a.user_text, SLICES_HEADER) == section(b.user_text, SLICES_HEADER)
    strip = lambda t: t.replace("\n".join(section(t, REQUESTS_HEADER)), "")
    assert strip(a.user_text) == strip(b.user_text)


def test_prompt_is_deterministic(scen):
    assert render_assignment_prompt(scen, 77) == render_assignment_prompt(scen, 77)


def test_similarity_prompt_single_pair(scen):
    b = render_similarity_prompt(scen.requests, [(2, 7)])
    assert section(b.user_text, "Pairs to judge:") == ["2@7"]
    assert "2@7@0 or 2@7@1" in b.user_text
    assert b.system_text == SYSTEM_TEXT


def test_similarity_prompt_rejects_empty_batch(scen):
    with pytest.raises(ValueError):
        render_similarity_prompt(scen.requests, [])


def test_similarity_prompt_enumerates_45_pairs():
    s = generate(GeneratorConfig(seed=1, n_requests=10))
    pairs = [(i, j) for i in range(10) for j in range(i + 1, 10)]
    b = render_similarity_prompt(s.requests, pairs)
    assert len(section(b.user_text, "Pairs to judge:")) == 45


def test_similarity_prompt_with_sublist(scen):
    b = render_similarity_prompt(scen.requests[3:5], [(3, 4)], indices=[3, 4])
    assert scen.requests[3].description in b.user_text
    with pytest.raises(ValueError):
        render_similarity_prompt(scen.requests[3:5], [(3, 6)], indices=[3, 4])


# parsing


def test_parses_example_block():
    a = parse_assignment_response("```\nSliceA@Request1@5\nSliceB@Request2@10\n```")
    assert a.rows == (AssignmentRow("SliceA", "Request1", 5), AssignmentRow("SliceB", "Request2", 10))


def test_prose_info_string_crlf_and_spaces():
    text = "Sure!\r\n```csv\r\n SliceA @ Request1 @ 5 \r\n\r\nSliceC@Request9@0\r\n```\r\nsecond:```\nX@Y@1\n```"
    a = parse_assignment_response(text)
    assert a.rows == (AssignmentRow("SliceA", "Request1", 5), AssignmentRow("SliceC", "Request9", 0))


@pytest.mark.parametrize(
    "text, error, line",
    [
        ("SliceA@Request1@5", NoCodeBlock, None),
        ("```\nSliceA@Request1@5", NoCodeBlock, None),
        ("```\nSliceA@Request1\n```", BadFieldCount, 1),
        ("```\nSliceA@Request1@5\nA@B@C@1\n```", BadFieldCount, 2),
        ("```\n@Request1@5\n```", BadFieldCount, 1),
        ("```\nSliceA@Request1@five\n```", BadInteger, 1),
        ("```\nSliceA@Request1@-5\n```", BadInteger, 1),
        ("```\nSliceA@Request1@5.0\n```", BadInteger, 1),
    ],
)
def test_parse_errors(text, error, line):
    with pytest.raises(error) as err:
        parse_assignment_response(text)
    if line is not None:
        assert err.value.line_no == line


def test_duplicate_request_named():
    with pytest.raises(DuplicateRequest) as err:
        parse_assignment_response("```\nSliceA@Request1@5\nSliceB@Request1@5\n```")
    assert err.value.request_id == "Request1" and err.value.line_no == 2


ID_CHARS = string.ascii_letters + string.digits + "_-., :"


def random_id(rng):
    core = "".join(rng.choice(ID_CHARS) for _ in range(rng.randint(1, 12))).strip()
    return core or "x"


def test_round_trip_randomized():
    rng = random.Random(0)
    for _ in range(1000):
        ids = list({random_id(rng) for _ in range(rng.randint(0, 15))})
        a = Assignment(tuple(AssignmentRow(random_id(rng), rid, rng.randint(0, 10**6)) for rid in ids))
        assert parse_assignment_response(serialize_assignment(a)) == a


def test_similarity_parse_drops_bad_lines():
    text = "```\n0@1@1\n1@2@maybe\n2@0@0\n5@6@1\n0@1@0\n```"
    assert parse_similarity_response(text, [(0, 1), (1, 2), (0, 2)]) == {(0, 1): 1, (0, 2): 0}
    assert parse_similarity_response("no block", [(0, 1)]) == {}


# providers


def test_provider_config_invariants():
    with pytest.raises(ConfigInvalid):
        ProviderConfig(temperature=2.5)
    with pytest.raises(ConfigInvalid):
        ProviderConfig(max_retries=-1)
    assert ProviderConfig().temperature == 0.8


def test_http_provider_requires_key(monkeypatch):
    monkeypatch.delenv("MY_KEY", raising=False)
    with pytest.raises(ConfigInvalid, match="MY_KEY"):
        HttpChatProvider(ProviderConfig(api_key_env="MY_KEY"))


def test_http_provider_wire_format(monkeypatch):
    monkeypatch.setenv("SLICEKIT_API_KEY", "sekrit")
    seen = []

    def handler(request: httpx.Request) -> httpx.Response:
        seen.append(request)
        return httpx.Response(200, json={"choices": [{"message": {"role": "assistant", "content": "hello"}}]})

    config = ProviderConfig(endpoint_url="http://llm.test/v1/chat/completions", model_name="m1")
    p = HttpChatProvider(config, client=httpx.Client(transport=httpx.MockTransport(handler)))
    assert p.chat("sys", "usr", 0.8) == "hello"
    body = json.loads(seen[0].content)
    assert body == {
        "model": "m1",
        "temperature": 0.8,
        "messages": [{"role": "system", "content": "sys"}, {"role": "user", "content": "usr"}],
    }
    assert seen[0].headers["authorization"] == "Bearer sekrit"


def test_http_provider_retries_then_fails(monkeypatch):
    monkeypatch.setenv("SLICEKIT_API_KEY", "k")
    calls = []

    def handler(request):
        calls.append(1)
        return httpx.Response(503)

    p = HttpChatProvider(ProviderConfig(max_retries=2), client=httpx.Client(transport=httpx.MockTransport(handler)))
    with pytest.raises(GatewayError):
        p.chat("s", "u", 0.8)
    assert len(calls) == 3


def test_http_provider_recovers(monkeypatch):
    monkeypatch.setenv("SLICEKIT_API_KEY", "k")
    responses = iter([httpx.Response(500), httpx.Response(200, json={"choices": []}),
                      httpx.Response(200, json={"choices": [{"message": {"content": "ok"}}]})])
    p = HttpChatProvider(ProviderConfig(max_retries=2),
                         client=httpx.Client(transport=httpx.MockTransport(lambda r: next(responses))))
    assert p.chat("s", "u", 0.8) == "ok"


# zero-shot with mocks


def test_greedy_by_class_covers_everything(scen):
    a = zero_shot_assign(scen, make_mock("greedy-by-class", scen), 3)
    assert len(a) == scen.n
    by_id = {r.id: r for r in scen.requests}
    slice_class = {s.id: s.slice_class for s in scen.slices}
    assert all(slice_class[row.slice_id] == by_id[row.request_id].archetype for row in a.rows)


def test_truncator_omits_last_listed(scen):
    mock = make_mock("truncator", scen)
    a = zero_shot_assign(scen, mock, 3)
    assert len(a) == scen.n - 1
    last = section(mock.calls[0][1], REQUESTS_HEADER)[-1]
    assert last.split(":")[0][2:] not in {row.request_id for row in a.rows}
    assert completeness(scen, a) < 100


def test_mocks_are_deterministic(scen):
    for name in ("greedy-by-class", "truncator", "capacity-blind"):
        runs = {serialize_assignment(zero_shot_assign(scen, make_mock(name, scen), 9)) for _ in range(3)}
        assert len(runs) == 1


def test_garbage_exhausts_retries(scen):
    mock = make_mock("garbage", scen)
    with pytest.raises(NoCodeBlock):
        zero_shot_assign(scen, mock, 0, max_retries=2)
    assert len(mock.calls) == 3
    assert "could not be parsed" in mock.calls[1][1] and "could not be parsed" not in mock.calls[0][1]
    assert all(c[2] == 0.8 for c in mock.calls)


def test_retry_succeeds_after_bad_reply(scen):
    good = serialize_assignment(Assignment((AssignmentRow("SliceA", "Request1", 1),)))
    replay = ReplayProvider([{"response": "nope"}, {"response": good}])
    assert len(zero_shot_assign(scen, replay, 0)) == 1


def test_replay_round_trip(scen, tmp_path):
    rec = RecordingProvider(make_mock("capacity-blind", scen))
    first = zero_shot_assign(scen, rec, 4)
    path = tmp_path / "t.json"
    path.write_text(json.dumps(rec.transcript))
    replay = ReplayProvider.from_file(path, strict=True)
    assert zero_shot_assign(scen, replay, 4) == first
    with pytest.raises(GatewayError, match="exhausted"):
        replay.chat("a", "b", 0.8)
    with pytest.raises(GatewayError, match="does not match"):
        ReplayProvider.from_file(path, strict=True).chat("other", "prompt", 0.8)


def test_unknown_mock(scen):
    with pytest.raises(ValueError):
        make_mock("oracle", scen)
