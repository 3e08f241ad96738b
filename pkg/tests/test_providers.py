import json
import threading
import time

import httpx
import numpy as np
import pytest

from p2baudit.errors import BudgetExceeded, EmptyInputText, ProviderRefusal, ProviderUnavailable
from p2baudit.providers import (
    GenerationConfig,
    HashEmbedder,
    HttpEmbedder,
    HttpGenerator,
    MockGenerator,
    TokenHashEmbedder,
    build_generator,
    estimate_tokens,
    parse_provider_config,
    prompt_hash,
)

CFG = GenerationConfig("m", context_limit_tokens=100, max_response_tokens=10)


def completion(text):
    return httpx.Response(200, json={"choices": [{"message": {"role": "assistant", "content": text}}]})


class Scripted:
    """Transport handler that replays a list of responses or exceptions and records requests."""

    def __init__(self, *outcomes):
        self.outcomes = list(outcomes)
        self.requests = []

    def __call__(self, request):
        self.requests.append(json.loads(request.content))
        out = self.outcomes.pop(0)
        if isinstance(out, Exception):
            raise out
        return out


def http_generator(handler, sleeps, **kw):
    return HttpGenerator("http://llm.test/v1/chat", transport=httpx.MockTransport(handler),
                         sleep=sleeps.append, backoff_base=0.5, **kw)


@pytest.mark.parametrize("text,expected", [("", 0), ("abcdefgh", 2), ("abcdefghi", 3), ("é", 1), ("éé€", 2)])
def test_estimate_tokens(text, expected):
    assert estimate_tokens(text) == expected


def test_scripted_mock_returns_exact_response():
    prompt = "Question: q"
    gen = MockGenerator({prompt_hash(prompt): "Score: 4. Explanation: ok"})
    assert gen.generate(CFG, prompt) == "Score: 4. Explanation: ok"


def test_unscripted_mock_refuses():
    with pytest.raises(ProviderRefusal):
        MockGenerator().generate(CFG, "anything")


def test_over_budget_prompt_never_reaches_the_provider():
    handler = Scripted()
    gen = http_generator(handler, [])
    with pytest.raises(BudgetExceeded):
        gen.generate(CFG, "x" * 4 * 91)
    assert handler.requests == []


def test_budget_boundary_is_inclusive():
    gen = MockGenerator(responder=lambda c, p: "ok")
    assert gen.generate(CFG, "x" * 4 * 90) == "ok"


def test_two_transport_failures_then_success():
    sleeps = []
    handler = Scripted(httpx.ConnectError("down"), httpx.ReadTimeout("slow"), completion("Yes"))
    assert http_generator(handler, sleeps).generate(CFG, "hi") == "Yes"
    assert len(handler.requests) == 3
    assert sleeps == [0.5, 1.0]


def test_payload_shape():
    handler = Scripted(completion("fine"))
    http_generator(handler, []).generate(CFG, "hello")
    assert handler.requests[0] == {"model": "m", "temperature": 0.0, "max_tokens": 10,
                                   "messages": [{"role": "user", "content": "hello"}]}


def test_rate_limit_and_server_errors_are_retried():
    handler = Scripted(httpx.Response(429), httpx.Response(503), completion("ok"))
    assert http_generator(handler, []).generate(CFG, "x") == "ok"


def test_retries_exhausted():
    sleeps = []
    handler = Scripted(httpx.Response(500), httpx.Response(502), httpx.Response(503))
    with pytest.raises(ProviderUnavailable):
        http_generator(handler, sleeps).generate(CFG, "x")
    assert len(sleeps) == 2


def test_client_error_is_a_refusal_without_retry():
    handler = Scripted(httpx.Response(400, json={"error": "bad"}))
    with pytest.raises(ProviderRefusal):
        http_generator(handler, []).generate(CFG, "x")
    assert len(handler.requests) == 1


def test_error_payload_and_empty_completion_are_refusals():
    with pytest.raises(ProviderRefusal):
        http_generator(Scripted(httpx.Response(200, json={"error": {"message": "filtered"}})), []).generate(CFG, "x")
    with pytest.raises(ProviderRefusal):
        http_generator(Scripted(completion("   ")), []).generate(CFG, "x")


def test_concurrency_cap_bounds_in_flight_calls():
    active = 0
    peak = 0
    lock = threading.Lock()

    def responder(config, prompt):
        nonlocal active, peak
        with lock:
            active += 1
            peak = max(peak, active)
        time.sleep(0.01)
        with lock:
            active -= 1
        return "ok"

    gen = MockGenerator(responder=responder, concurrency_cap=2)
    threads = [threading.Thread(target=gen.generate, args=(CFG, f"p{i}")) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert peak <= 2
    assert gen.calls == 8


@pytest.mark.parametrize("embedder", [HashEmbedder(), TokenHashEmbedder()])
def test_embedders_are_deterministic_and_unit_norm(embedder):
    v = embedder.embed(["a cat", "a cat", "a dog"])
    assert np.array_equal(v[0], v[1])
    assert np.allclose(np.linalg.norm(v, axis=1), 1.0)
    with pytest.raises(EmptyInputText):
        embedder.embed([""])


def test_token_embedder_reflects_shared_vocabulary():
    e = TokenHashEmbedder()
    q, near, far = e.embed(["ranking parameters", "the ranking parameters used", "cookie banner colours"])
    assert q @ near > q @ far


def test_http_embedder_batches_and_orders_by_index():
    seen = []

    def handler(request):
        body = json.loads(request.content)
        seen.append(body["input"])
        data = [{"index": i, "embedding": [float(len(t)), 1.0]} for i, t in enumerate(body["input"])]
        return httpx.Response(200, json={"data": list(reversed(data))})

    emb = HttpEmbedder("http://emb.test", "e", batch_size=2, transport=httpx.MockTransport(handler))
    v = emb.embed(["a", "bbb", "cc"])
    assert seen == [["a", "bbb"], ["cc"]]
    expected = np.array([[1, 1], [3, 1], [2, 1]], dtype=float)
    assert np.allclose(v, expected / np.linalg.norm(expected, axis=1, keepdims=True))


def test_config_rejects_inline_keys():
    with pytest.raises(ValueError):
        parse_provider_config({"generation": {"endpoint_url": "u", "model_id": "m", "api_key": "sk-x"}})


def test_config_reads_key_from_environment(monkeypatch):
    monkeypatch.setenv("P2B_TEST_KEY", "secret")
    cfg = parse_provider_config({"generation": {"endpoint_url": "http://llm.test", "model_id": "m",
                                                "api_key_env": "P2B_TEST_KEY"},
                                 "max_attempts": 1})
    auth = []

    def handler(request):
        auth.append(request.headers.get("authorization"))
        return completion("ok")

    gen = build_generator(cfg, transport=httpx.MockTransport(handler))
    gen.generate(cfg.generation_config(), "x")
    assert auth == ["Bearer secret"]


def test_temperature_is_fixed():
    with pytest.raises(ValueError):
        GenerationConfig("m", temperature=0.7)
