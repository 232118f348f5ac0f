"""Chat-completion client with retries, rate limiting and a mock backend."""

from __future__ import annotations

import hashlib
import logging
import os
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol

import httpx

log = logging.getLogger(__name__)


class EndpointError(RuntimeError):
    """The endpoint could not produce a response (retries exhausted or fatal status)."""


class TransientError(RuntimeError):
    pass


@dataclass(frozen=True)
class LlmEndpointConfig:
    base_url: str = "https://api.openai.com/v1"
    model: str = "gpt-4o"
    api_key_env: str = "OPENAI_API_KEY"
    max_retries: int = 3
    timeout: float = 120.0
    temperature: float = 0.7
    backoff_base: float = 1.0
    backoff_max: float = 30.0
    max_in_flight: int = 4
    requests_per_minute: int = 0  # 0 disables the per-minute limit

    def __post_init__(self):
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.timeout <= 0:
            raise ValueError("timeout must be > 0")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")

    @classmethod
    def from_dict(cls, d: dict) -> "LlmEndpointConfig":
        return cls(**d)


@dataclass
class Completion:
    text: str
    prompt_tokens: Optional[int] = None
    completion_tokens: Optional[int] = None


class Backend(Protocol):
    def complete(self, prompt: str, temperature: float) -> Completion: ...


class HttpBackend:
    """OpenAI-compatible ``/chat/completions`` endpoint."""

    def __init__(self, cfg: LlmEndpointConfig, transport: httpx.BaseTransport | None = None):
        self.cfg = cfg
        headers = {}
        key = os.environ.get(cfg.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        self.client = httpx.Client(base_url=cfg.base_url, timeout=cfg.timeout,
                                   headers=headers, transport=transport)

    def complete(self, prompt: str, temperature: float) -> Completion:
        body = {
            "model": self.cfg.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": temperature,
        }
        try:
            r = self.client.post("/chat/completions", json=body)
        except httpx.TransportError as exc:
            raise TransientError(str(exc)) from exc
        if r.status_code == 429 or r.status_code >= 500:
            raise TransientError(f"HTTP {r.status_code}")
        if r.status_code >= 400:
            raise EndpointError(f"HTTP {r.status_code}: {r.text[:200]}")
        try:
            data = r.json()
            text = data["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise EndpointError(f"malformed completion payload: {exc}") from exc
        usage = data.get("usage") or {}
        return Completion(text or "", usage.get("prompt_tokens"), usage.get("completion_tokens"))


class MockBackend:
    """Deterministic backend: a function from prompt to response text.

    ``fail_first`` makes the first n calls raise a transient error, which is
    how retry behaviour is exercised without a network.
    """

    def __init__(self, responder: Callable[[str], str], fail_first: int = 0):
        self.responder = responder
        self.fail_first = fail_first
        self.calls: list[str] = []
        self._lock = threading.Lock()

    def complete(self, prompt: str, temperature: float) -> Completion:
        with self._lock:
            self.calls.append(prompt)
            if self.fail_first > 0:
                self.fail_first -= 1
                raise TransientError("mock transient failure")
        return Completion(self.responder(prompt))


class RateLimiter:
    """Bounds concurrent requests and spaces request starts."""

    def __init__(self, max_in_flight: int = 4, per_minute: int = 0, clock=time.monotonic, sleep=time.sleep):
        self._sem = threading.BoundedSemaphore(max_in_flight)
        self._interval = 60.0 / per_minute if per_minute > 0 else 0.0
        self._lock = threading.Lock()
        self._next = 0.0
        self._clock = clock
        self._sleep = sleep

    @classmethod
    def for_config(cls, cfg: LlmEndpointConfig) -> "RateLimiter":
        return cls(cfg.max_in_flight, cfg.requests_per_minute)

    def __enter__(self):
        self._sem.acquire()
        if self._interval:
            with self._lock:
                now = self._clock()
                start = max(now, self._next)
                self._next = start + self._interval
            if start > now:
                self._sleep(start - now)
        return self

    def __exit__(self, *exc):
        self._sem.release()
        return False


@dataclass
class CallStats:
    calls: int = 0
    retries: int = 0
    failures: int = 0
    prompt_tokens: int = 0
    completion_tokens: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def add(self, **kw) -> None:
        with self._lock:
            for k, v in kw.items():
                setattr(self, k, getattr(self, k) + (v or 0))


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()[:12]


def call_llm(prompt: str, cfg: LlmEndpointConfig, backend: Backend | None = None, *,
             temperature: float | None = None, limiter: RateLimiter | None = None,
             stats: CallStats | None = None, sleep=time.sleep) -> str:
    """Send one prompt; retry transient failures with exponential backoff."""
    backend = backend or HttpBackend(cfg)
    temp = cfg.temperature if temperature is None else temperature
    ph = prompt_hash(prompt)
    for attempt in range(cfg.max_retries + 1):
        try:
            if limiter is not None:
                with limiter:
                    out = backend.complete(prompt, temp)
            else:
                out = backend.complete(prompt, temp)
        except TransientError as exc:
            if attempt == cfg.max_retries:
                log.warning("llm call %s failed after %d attempts: %s", ph, attempt + 1, exc)
                if stats:
                    stats.add(failures=1)
                raise EndpointError(f"retries exhausted: {exc}") from exc
            delay = min(cfg.backoff_max, cfg.backoff_base * 2 ** attempt)
            log.info("llm call %s transient error (%s); retry in %.1fs", ph, exc, delay)
            if stats:
                stats.add(retries=1)
            sleep(delay)
            continue
        except EndpointError:
            if stats:
                stats.add(failures=1)
            raise
        log.info("llm call %s ok prompt_tokens=%s completion_tokens=%s",
                 ph, out.prompt_tokens, out.completion_tokens)
        if stats:
            stats.add(calls=1, prompt_tokens=out.prompt_tokens, completion_tokens=out.completion_tokens)
        return out.text
    raise AssertionError("unreachable")
