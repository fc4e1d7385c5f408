import json
from pathlib import Path

import httpx
import pytest
from hypothesis import given, settings, strategies as st

from sngen.backends import (
    ChatBackend,
    ChatConfig,
    HttpxTransport,
    MockUniformBackend,
    RecordedSession,
    RecordingTransport,
    ReplayTransport,
    build_system_prompt,
    build_user_prompt,
    krk_prompt,
    mock_uniform_sample,
    molecule_prompt,
    parse_candidate_list,
    render_list,
)
from sngen.backends.chat import TransportError
from sngen.backends.prompts import Mode
from sngen.exceptions import BackendError, CredentialsError, ParseFailure, ReplayMismatch
from sngen.gen import GeneratorContext

from _fake_server import FakeServer

GOLDEN = Path(__file__).parent / "golden"
FIXTURES = Path(__file__).parent / "fixtures"


def golden(name):
    return (GOLDEN / name).read_text()


def test_system_prompt_golden():
    assert build_system_prompt() == golden("system_prompt.txt")


@pytest.mark.parametrize(
    "mode,pos,ctx,s,name",
    [
        ("seeded", ["CCO", "c1ccccc1O"], [], 10, "user_seeded.txt"),
        ("unseeded", [], [], 10, "user_unseeded.txt"),
        ("seeded", ["CCO", "c1ccccc1O"], ["CCN", "CC(=O)O"], 10, "user_seeded_context.txt"),
        ("unseeded", [], ["CCN"], 30, "user_unseeded_context.txt"),
    ],
)
def test_user_prompt_golden(mode, pos, ctx, s, name):
    assert build_user_prompt(mode, pos, ctx, s) == golden(name)


def test_seeded_prompt_needs_positives():
    with pytest.raises(ValueError):
        build_user_prompt(Mode.SEEDED, [], [], 5)


def test_molecule_prompt_feeds_back_feasible_only():
    ctx = GeneratorContext("ignored", ("CCO", "c1ccccc1O"))
    ctx.record(True, "CCN")
    ctx.record(False, "XX")
    ctx.record(True, "CC(=O)O")
    spec = molecule_prompt(ctx, 10)
    assert spec.system == golden("system_prompt.txt")
    assert spec.user == golden("user_seeded_context.txt")
    assert molecule_prompt(GeneratorContext("h"), 10).user == golden("user_unseeded.txt")


def test_krk_prompt_mentions_theory_and_history():
    ctx = GeneratorContext("THEORY", ("(c,2,a,5,a,1)",))
    ctx.record(False, "(d,4,h,8,a,1)")
    spec = krk_prompt(ctx, 30)
    assert "THEORY" in spec.user and "false: (d,4,h,8,a,1)" in spec.user
    assert "[(c,2,a,5,a,1)]" in spec.user
    assert parse_candidate_list("[(c,2,a,5,a,1), (d,1,b,1,d,1)]") == ["(c,2,a,5,a,1)", "(d,1,b,1,d,1)"]


def test_parser_cases():
    assert parse_candidate_list("Sure! [CCO, C[NH3+], CC(C)N] thanks") == ["CCO", "C[NH3+]", "CC(C)N"]
    assert parse_candidate_list("[]") == []
    assert parse_candidate_list("[a,, b]") == ["a", "b"]
    with pytest.raises(ParseFailure):
        parse_candidate_list("no list here")
    with pytest.raises(ParseFailure):
        parse_candidate_list("[CCO, CCN")


atom = st.sampled_from(["C", "N", "O", "c1ccccc1", "[NH3+]", "S", "F", "Cl"])
smiles = st.lists(atom, min_size=1, max_size=6).map("".join)
branch = st.tuples(smiles, smiles).map(lambda t: f"{t[0]}({t[1]})")
item = st.one_of(smiles, branch)


@settings(max_examples=300)
@given(st.lists(item, max_size=12))
def test_parser_round_trips_rendered_lists(items):
    assert parse_candidate_list(render_list(items)) == items


def test_mock_uniform_is_deterministic():
    u = ["a", "b", "c", "d"]
    assert mock_uniform_sample(u, 20, 3) == mock_uniform_sample(u, 20, 3)
    assert set(mock_uniform_sample(u, 200, 1)) == set(u)
    assert MockUniformBackend(u).sample(GeneratorContext("h"), 5, 9) == mock_uniform_sample(u, 5, 9)
    with pytest.raises(ValueError):
        MockUniformBackend([])


def test_missing_key_raises(monkeypatch):
    monkeypatch.delenv("SNG_TEST_KEY", raising=False)
    with pytest.raises(CredentialsError):
        ChatBackend(ChatConfig(api_key_env="SNG_TEST_KEY"), transport=FakeServer(["C"]))


def test_request_body_and_auth_header(monkeypatch):
    monkeypatch.setenv("SNG_TEST_KEY", "sekret")
    seen = {}

    def transport(url, headers, body, timeout):
        seen.update(url=url, headers=headers, body=body)
        return {"choices": [{"message": {"content": "[CCO, CCN, CCC]"}}]}

    b = ChatBackend(ChatConfig(api_key_env="SNG_TEST_KEY", model="m1"), transport)
    assert b.sample(GeneratorContext("h"), 2) == ["CCO", "CCN"]
    assert seen["url"] == "https://api.openai.com/v1/chat/completions"
    assert seen["headers"]["Authorization"] == "Bearer sekret"
    assert seen["body"]["max_tokens"] == 256 and seen["body"]["model"] == "m1"
    assert [m["role"] for m in seen["body"]["messages"]] == ["system", "user"]


def test_retries_then_succeeds_and_then_gives_up():
    sleeps = []
    server = FakeServer(["C"], fail_first=2)
    b = ChatBackend(ChatConfig(api_key_env=None, retries=2, backoff=0.5), server, sleep=sleeps.append)
    assert b.sample(GeneratorContext("h"), 1) == ["C"]
    assert server.calls == 3 and sleeps == [0.5, 1.0]
    b = ChatBackend(ChatConfig(api_key_env=None, retries=1), FakeServer(["C"], fail_first=5), sleep=lambda _: None)
    with pytest.raises(BackendError):
        b.sample(GeneratorContext("h"), 1)


def test_malformed_and_unparseable_replies():
    b = ChatBackend(ChatConfig(api_key_env=None), lambda *a: {"nope": 1})
    with pytest.raises(BackendError):
        b.sample(GeneratorContext("h"), 1)
    b = ChatBackend(ChatConfig(api_key_env=None), lambda *a: {"choices": [{"message": {"content": "sorry"}}]})
    assert b.sample(GeneratorContext("h"), 1) == []


def test_httpx_transport_status_handling():
    def handler(request):
        body = json.loads(request.content)
        if body.get("fail"):
            return httpx.Response(500, text="oops")
        return httpx.Response(200, json={"ok": True})

    t = HttpxTransport(httpx.Client(transport=httpx.MockTransport(handler)))
    assert t("http://x/chat/completions", {}, {}, 1.0) == {"ok": True}
    with pytest.raises(TransportError) as info:
        t("http://x/chat/completions", {}, {"fail": True}, 1.0)
    assert info.value.status == 500


def test_replay_fixture_includes_failure_and_retry():
    session = RecordedSession.load(FIXTURES / "chat_session.json")
    assert session.interactions[0][1]["status"] == 503
    b = ChatBackend(ChatConfig(api_key_env=None, backoff=0), ReplayTransport(session))
    ctx = GeneratorContext("h", ("CCO",))
    assert b.sample(ctx, 3, 0) == ["CCO", "CCN", "CCO"]
    ctx.record(True, "CCN")
    assert b.sample(ctx, 2, 1) == ["CCO", "CCN"]
    with pytest.raises(ReplayMismatch):
        b.sample(ctx, 2, 1)


def test_replay_rejects_different_request():
    session = RecordedSession.load(FIXTURES / "chat_session.json")
    b = ChatBackend(ChatConfig(api_key_env=None, backoff=0, model="other"), ReplayTransport(session))
    with pytest.raises(ReplayMismatch):
        b.sample(GeneratorContext("h", ("CCO",)), 3)


def test_record_then_replay_round_trip(tmp_path):
    rec = RecordingTransport(FakeServer(["C", "N", "O"]))
    live = ChatBackend(ChatConfig(api_key_env=None), rec)
    ctx = GeneratorContext("h")
    first = [live.sample(ctx, 4, i) for i in range(3)]
    rec.session.save(tmp_path / "s.json")
    replay = ChatBackend(ChatConfig(api_key_env=None), ReplayTransport(RecordedSession.load(tmp_path / "s.json")))
    assert [replay.sample(ctx, 4, i) for i in range(3)] == first
