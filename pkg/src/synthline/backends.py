"""Completion backends: the chat-completions HTTP client used for real
generation and a deterministic mock for offline runs and tests."""

from __future__ import annotations

import asyncio
import hashlib
import os
import re
from typing import TYPE_CHECKING, Protocol

from .feature_model import SynthlineError

if TYPE_CHECKING:
    from .generation import GenerationParams

API_KEY_ENV = "SYNTHLINE_API_KEY"

_DOMAIN_RE = re.compile(r"^4\. Is for a (.*) system$", re.MULTILINE)


class BackendError(SynthlineError):
    pass


class TransientBackendError(BackendError):
    """Timeouts, connection failures, HTTP 429/5xx; safe to retry."""


class PermanentBackendError(BackendError):
    """Authentication and other non-retryable failures; aborts the run."""


class CompletionBackend(Protocol):
    name: str

    async def complete(self, prompt_text: str, params: "GenerationParams") -> str: ...


class MockBackend:
    """Deterministic offline backend.

    Output is "REQ-" plus a short digest of (prompt, params) plus the domain
    echoed from the prompt, so distinct prompts yield distinct texts and
    reruns are byte-identical. Fault injection: `fail_first` makes the first
    k attempts per prompt fail transiently, `always_fail` fails every
    attempt, `permanent` turns injected failures into permanent ones, and
    `delay` simulates latency (used to observe real concurrency).
    """

    name = "mock"

    def __init__(
        self,
        fail_first: int = 0,
        always_fail: bool = False,
        permanent: bool = False,
        delay: float = 0.0,
    ):
        self.fail_first = fail_first
        self.always_fail = always_fail
        self.permanent = permanent
        self.delay = delay
        self.calls = 0
        self.in_flight = 0
        self.max_in_flight = 0
        self._attempts: dict[str, int] = {}

    async def complete(self, prompt_text: str, params: "GenerationParams") -> str:
        self.calls += 1
        self.in_flight += 1
        self.max_in_flight = max(self.max_in_flight, self.in_flight)
        try:
            if self.delay:
                await asyncio.sleep(self.delay)
            attempt = self._attempts.get(prompt_text, 0) + 1
            self._attempts[prompt_text] = attempt
            if self.always_fail or attempt <= self.fail_first:
                if self.permanent:
                    raise PermanentBackendError("injected permanent failure")
                raise TransientBackendError(f"injected transient failure (attempt {attempt})")
            digest = hashlib.sha256(
                f"{prompt_text}\x00{params.model_name}\x00{params.temperature}\x00{params.top_p}".encode("utf-8")
            ).hexdigest()[:10]
            m = _DOMAIN_RE.search(prompt_text)
            domain = m.group(1) if m else "unspecified"
            return f"REQ-{digest}: The {domain} system shall satisfy generated requirement {digest}."
        finally:
            self.in_flight -= 1


class HttpChatBackend:
    """Chat-completions client: one user message per request, fields
    model/temperature/top_p; no system message unless one is configured.

    Retryable failures (timeouts, connection errors, HTTP 429/5xx) raise
    :class:`TransientBackendError`; 401/403 and other client errors raise
    :class:`PermanentBackendError`. The API key comes from SYNTHLINE_API_KEY
    unless given explicitly.
    """

    def __init__(
        self,
        base_url: str,
        api_key: str | None = None,
        system_message: str | None = None,
        max_tokens: int | None = None,
        stop: list[str] | None = None,
        timeout: float = 60.0,
        client=None,
    ):
        import httpx

        self.base_url = base_url.rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        self.system_message = system_message
        self.max_tokens = max_tokens
        self.stop = stop
        self.name = f"http:{self.base_url}"
        self._client = client or httpx.AsyncClient(timeout=timeout)

    def build_request(self, prompt_text: str, params: "GenerationParams") -> dict:
        messages = []
        if self.system_message:
            messages.append({"role": "system", "content": self.system_message})
        messages.append({"role": "user", "content": prompt_text})
        body = {
            "model": params.model_name,
            "messages": messages,
            "temperature": params.temperature,
            "top_p": params.top_p,
        }
        if self.max_tokens is not None:
            body["max_tokens"] = self.max_tokens
        if self.stop:
            body["stop"] = self.stop
        return body

    async def complete(self, prompt_text: str, params: "GenerationParams") -> str:
        import httpx

        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            resp = await self._client.post(
                f"{self.base_url}/chat/completions",
                headers=headers,
                json=self.build_request(prompt_text, params),
            )
        except (httpx.TimeoutException, httpx.ConnectError, httpx.ReadError) as e:
            raise TransientBackendError(f"connection failure: {e}") from None
        if resp.status_code == 429 or resp.status_code >= 500:
            raise TransientBackendError(f"HTTP {resp.status_code}")
        if resp.status_code in (401, 403):
            raise PermanentBackendError(f"authentication failed (HTTP {resp.status_code})")
        if resp.status_code >= 400:
            raise PermanentBackendError(f"HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as e:
            raise PermanentBackendError(f"malformed completion response: {e}") from None

    async def aclose(self) -> None:
        await self._client.aclose()


def make_backend(spec: str, **kwargs) -> CompletionBackend:
    """``mock`` (with optional fault/latency options, e.g.
    ``mock?delay=0.05&fail_first=1``) or a chat-completions base URL."""
    if spec == "mock" or spec.startswith("mock?"):
        options: dict = {}
        if "?" in spec:
            for pair in spec.split("?", 1)[1].split("&"):
                if not pair:
                    continue
                key, _, value = pair.partition("=")
                if key == "delay":
                    options["delay"] = float(value)
                elif key == "fail_first":
                    options["fail_first"] = int(value)
                elif key in ("always_fail", "permanent"):
                    options[key] = value.lower() in ("1", "true", "yes")
                else:
                    raise BackendError(f"unknown mock option '{key}'")
        return MockBackend(**options)
    if spec.startswith("http://") or spec.startswith("https://"):
        return HttpChatBackend(spec, **kwargs)
    raise BackendError(f"unknown backend '{spec}' (use 'mock' or a base URL)")
