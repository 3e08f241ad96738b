"""Text generation and embedding providers, plus token budgeting.

Two families of providers share one surface:

* HTTP clients speaking a generic chat-completion / embedding JSON contract,
  configured per deployment (no vendor is hard-coded);
* deterministic in-process mocks whose outputs are pure functions of their
  inputs, used for tests and reproducible dry runs.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import re
import threading
import time
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Mapping, Sequence

import httpx
import numpy as np

from .errors import (
    BudgetExceeded,
    EmptyInputText,
    MissingFile,
    ProviderRefusal,
    ProviderUnavailable,
)

logger = logging.getLogger(__name__)

REFERENCE_CONTEXT_LIMITS = {"gpt-4-0613": 8192, "gpt-3.5-turbo-16k-0613": 16385}
DEFAULT_CONCURRENCY_CAP = 4
NORM_TOLERANCE = 1e-6


def estimate_tokens(text: str) -> int:
    """Rough token count: UTF-8 bytes divided by four, rounded up."""
    return math.ceil(len(text.encode("utf-8")) / 4)


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class GenerationConfig:
    model_id: str
    context_limit_tokens: int = 8192
    max_response_tokens: int = 512
    temperature: float = 0.0

    def __post_init__(self):
        if self.temperature != 0:
            raise ValueError("generation temperature is fixed at 0")
        if self.context_limit_tokens <= 0 or self.max_response_tokens <= 0:
            raise ValueError("token limits must be positive")

    def check_budget(self, prompt: str) -> None:
        needed = estimate_tokens(prompt) + self.max_response_tokens
        if needed > self.context_limit_tokens:
            raise BudgetExceeded(
                f"prompt needs {needed} tokens, context limit is {self.context_limit_tokens}"
            )


class TextGenerator:
    """Base class: enforces the token budget and the in-flight request cap."""

    def __init__(self, concurrency_cap: int = DEFAULT_CONCURRENCY_CAP):
        if concurrency_cap < 1:
            raise ValueError("concurrency_cap must be >= 1")
        self.concurrency_cap = concurrency_cap
        self._slots = threading.BoundedSemaphore(concurrency_cap)

    def generate(self, config: GenerationConfig, prompt: str) -> str:
        config.check_budget(prompt)
        with self._slots:
            text = self._complete(config, prompt)
        if not text or not text.strip():
            raise ProviderRefusal("provider returned an empty completion")
        return text

    def _complete(self, config: GenerationConfig, prompt: str) -> str:
        raise NotImplementedError


class MockGenerator(TextGenerator):
    """Deterministic generator.

    ``script`` maps :func:`prompt_hash` values to canned responses; prompts not
    in the script go to ``responder(config, prompt)``. With neither, the call
    is refused.
    """

    def __init__(
        self,
        script: Mapping[str, str] | None = None,
        responder: Callable[[GenerationConfig, str], str] | None = None,
        concurrency_cap: int = DEFAULT_CONCURRENCY_CAP,
    ):
        super().__init__(concurrency_cap)
        self.script = dict(script or {})
        self.responder = responder
        self._lock = threading.Lock()
        self.calls = 0

    def _complete(self, config, prompt):
        with self._lock:
            self.calls += 1
        h = prompt_hash(prompt)
        if h in self.script:
            return self.script[h]
        if self.responder is not None:
            return self.responder(config, prompt)
        raise ProviderRefusal(f"mock has no response for prompt {h[:12]}")


def _transient(response: httpx.Response) -> bool:
    return response.status_code == 429 or response.status_code >= 500


class _HttpClient:
    def __init__(self, endpoint_url, api_key=None, timeout=60.0, max_attempts=3,
                 backoff_base=1.0, sleep=time.sleep, transport=None):
        self.endpoint_url = endpoint_url
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self._sleep = sleep
        headers = {"Content-Type": "application/json"}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        # httpx.Client is thread-safe for concurrent requests
        self._client = httpx.Client(headers=headers, timeout=timeout, transport=transport)

    def post(self, payload: dict) -> dict:
        last_error = None
        for attempt in range(self.max_attempts):
            if attempt:
                self._sleep(self.backoff_base * 2 ** (attempt - 1))
            try:
                response = self._client.post(self.endpoint_url, json=payload)
            except httpx.TransportError as exc:
                last_error = exc
                logger.warning("transport failure on attempt %d: %s", attempt + 1, exc)
                continue
            if _transient(response):
                last_error = f"HTTP {response.status_code}"
                logger.warning("transient HTTP %d on attempt %d", response.status_code, attempt + 1)
                continue
            if response.status_code >= 400:
                raise ProviderRefusal(f"HTTP {response.status_code}: {response.text[:200]}")
            try:
                body = response.json()
            except ValueError as exc:
                raise ProviderRefusal(f"non-JSON response: {exc}") from exc
            if not isinstance(body, dict) or "error" in body:
                raise ProviderRefusal(f"error payload: {str(body)[:200]}")
            return body
        raise ProviderUnavailable(
            f"{self.endpoint_url} unavailable after {self.max_attempts} attempts: {last_error}"
        )

    def close(self):
        self._client.close()


class HttpGenerator(TextGenerator):
    """Chat-completion client: POSTs ``{model, temperature, max_tokens, messages}``."""

    def __init__(self, endpoint_url: str, api_key: str | None = None,
                 concurrency_cap: int = DEFAULT_CONCURRENCY_CAP, **http_options):
        super().__init__(concurrency_cap)
        self._http = _HttpClient(endpoint_url, api_key, **http_options)

    def _complete(self, config, prompt):
        body = self._http.post({
            "model": config.model_id,
            "temperature": config.temperature,
            "max_tokens": config.max_response_tokens,
            "messages": [{"role": "user", "content": prompt}],
        })
        try:
            return body["choices"][0]["message"]["content"] or ""
        except (KeyError, IndexError, TypeError):
            raise ProviderRefusal(f"unexpected completion payload: {str(body)[:200]}") from None


def normalize_rows(matrix: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim == 1:
        matrix = matrix[None, :]
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise ProviderRefusal("provider returned a zero embedding")
    return matrix / norms


class Embedder:
    """Maps texts to unit vectors, one row per input text."""

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        texts = list(texts)
        for i, t in enumerate(texts):
            if not t:
                raise EmptyInputText(f"text {i} is empty")
        if not texts:
            return np.zeros((0, 0))
        return normalize_rows(self._embed(texts))

    def _embed(self, texts: list[str]) -> np.ndarray:
        raise NotImplementedError


def _seeded_unit(key: str, dim: int) -> np.ndarray:
    seed = int.from_bytes(hashlib.sha256(key.encode("utf-8")).digest()[:8], "little")
    v = np.random.default_rng(seed).standard_normal(dim)
    return v / np.linalg.norm(v)


class HashEmbedder(Embedder):
    """One hash-seeded pseudo-random unit vector per distinct text."""

    def __init__(self, dim: int = 256):
        self.dim = dim

    def _embed(self, texts):
        return np.stack([_seeded_unit(t, self.dim) for t in texts])


_TOKEN = re.compile(r"[a-z0-9]+")
_STOPWORDS = frozenset(
    "a an and are as at be by can could do does for from has have how if in into is it its "
    "of on or our that the their them there these they this to was we were what when where "
    "which who why will with you your".split()
)


def content_tokens(text: str) -> list[str]:
    """Lower-cased alphanumeric tokens minus stopwords, with a plural ``s`` stripped."""
    out = []
    for tok in _TOKEN.findall(text.lower()):
        if tok in _STOPWORDS:
            continue
        if len(tok) > 3 and tok.endswith("s") and not tok.endswith("ss"):
            tok = tok[:-1]
        out.append(tok)
    return out


class TokenHashEmbedder(Embedder):
    """Deterministic bag-of-words embedder built from hash-seeded token vectors.

    Texts sharing vocabulary get correlated vectors, so retrieval over mock
    embeddings ranks lexically related paragraphs first. Identical texts map
    to identical vectors. A text with no content tokens falls back to a
    hash-seeded vector of the whole string.
    """

    def __init__(self, dim: int = 512):
        self.dim = dim
        self._token_vec = lru_cache(maxsize=65536)(lambda tok: _seeded_unit("tok:" + tok, dim))

    def _embed(self, texts):
        rows = []
        for t in texts:
            counts: dict[str, int] = {}
            for tok in content_tokens(t):
                counts[tok] = counts.get(tok, 0) + 1
            if not counts:
                rows.append(_seeded_unit(t, self.dim))
                continue
            v = np.zeros(self.dim)
            for tok in sorted(counts):
                v += math.sqrt(counts[tok]) * self._token_vec(tok)
            if not np.any(v):
                v = _seeded_unit(t, self.dim)
            rows.append(v)
        return np.stack(rows)


class HttpEmbedder(Embedder):
    """Embedding client: POSTs ``{model, input}``, reads ``data[i].embedding``."""

    def __init__(self, endpoint_url: str, model_id: str, api_key: str | None = None,
                 batch_size: int = 64, **http_options):
        self.model_id = model_id
        self.batch_size = batch_size
        self._http = _HttpClient(endpoint_url, api_key, **http_options)

    def _embed(self, texts):
        rows = []
        for start in range(0, len(texts), self.batch_size):
            batch = texts[start:start + self.batch_size]
            body = self._http.post({"model": self.model_id, "input": batch})
            try:
                data = sorted(body["data"], key=lambda d: d.get("index", 0))
                vectors = [d["embedding"] for d in data]
            except (KeyError, TypeError):
                raise ProviderRefusal(f"unexpected embedding payload: {str(body)[:200]}") from None
            if len(vectors) != len(batch):
                raise ProviderRefusal("embedding count does not match input count")
            rows.extend(vectors)
        return np.asarray(rows, dtype=np.float64)


# -- configuration -----------------------------------------------------------

@dataclass(frozen=True)
class EndpointConfig:
    endpoint_url: str
    model_id: str
    api_key_env: str | None = None
    context_limit_tokens: int = 8192
    max_response_tokens: int = 512


@dataclass(frozen=True)
class ProviderConfig:
    generation: EndpointConfig | None = None
    embedding: EndpointConfig | None = None
    concurrency_cap: int = DEFAULT_CONCURRENCY_CAP
    max_attempts: int = 3
    backoff_base_seconds: float = 1.0
    extra: dict = field(default_factory=dict)

    def generation_config(self) -> GenerationConfig:
        if self.generation is None:
            raise ValueError("config has no 'generation' section")
        g = self.generation
        return GenerationConfig(g.model_id, g.context_limit_tokens, g.max_response_tokens)


def _endpoint(section, name) -> EndpointConfig | None:
    if section is None:
        return None
    if not isinstance(section, dict):
        raise ValueError(f"config section {name!r} must be an object")
    for key in ("endpoint_url", "model_id"):
        if not isinstance(section.get(key), str):
            raise ValueError(f"config section {name!r} needs a string {key!r}")
    if "api_key" in section:
        raise ValueError("API keys are read from the environment; name the variable in 'api_key_env'")
    return EndpointConfig(
        endpoint_url=section["endpoint_url"],
        model_id=section["model_id"],
        api_key_env=section.get("api_key_env"),
        context_limit_tokens=int(section.get("context_limit_tokens", 8192)),
        max_response_tokens=int(section.get("max_response_tokens", 512)),
    )


def parse_provider_config(data: dict) -> ProviderConfig:
    known = {"generation", "embedding", "concurrency_cap", "max_attempts", "backoff_base_seconds"}
    return ProviderConfig(
        generation=_endpoint(data.get("generation"), "generation"),
        embedding=_endpoint(data.get("embedding"), "embedding"),
        concurrency_cap=int(data.get("concurrency_cap", DEFAULT_CONCURRENCY_CAP)),
        max_attempts=int(data.get("max_attempts", 3)),
        backoff_base_seconds=float(data.get("backoff_base_seconds", 1.0)),
        extra={k: v for k, v in data.items() if k not in known},
    )


def load_provider_config(path) -> ProviderConfig:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(f"config not found: {path}")
    return parse_provider_config(json.loads(path.read_text(encoding="utf-8")))


def _api_key(env_name):
    if not env_name:
        return None
    key = os.environ.get(env_name)
    if key is None:
        logger.warning("environment variable %s is not set; sending no credentials", env_name)
    return key


def build_generator(cfg: ProviderConfig, **http_options) -> HttpGenerator:
    g = cfg.generation
    if g is None:
        raise ValueError("config has no 'generation' section")
    return HttpGenerator(g.endpoint_url, _api_key(g.api_key_env), concurrency_cap=cfg.concurrency_cap,
                         max_attempts=cfg.max_attempts, backoff_base=cfg.backoff_base_seconds,
                         **http_options)


def build_embedder(cfg: ProviderConfig, **http_options) -> HttpEmbedder:
    e = cfg.embedding
    if e is None:
        raise ValueError("config has no 'embedding' section")
    return HttpEmbedder(e.endpoint_url, e.model_id, _api_key(e.api_key_env),
                        max_attempts=cfg.max_attempts, backoff_base=cfg.backoff_base_seconds,
                        **http_options)
