"""Prompt templates and completion backends.

Templates are plain-text files with a single literal ``{{BODY}}`` slot where
the document body is inserted. Backends satisfy a one-method contract so the
extraction pipeline can run against a live HTTP endpoint, a directory of
recorded replies, or a canned in-memory reply.

The HTTP backend speaks the chat-completion wire format:
request ``{model, temperature, messages: [{role: "user", content}]}``,
reply ``{choices: [{message: {content}}]}`` with a bare-text
``{choices: [{text}]}`` fallback. Credentials come from the ``LLM_API_KEY``
environment variable only; there is no key flag or config entry.
"""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Protocol

import requests

from .errors import InvalidTemplate, LlmFailure

logger = logging.getLogger(__name__)

BODY_SLOT = "{{BODY}}"
DEFAULT_MODEL = "llama-3.3-70b-instruct"
RETRYABLE_STATUS = frozenset({429})


def default_temperature(model: str) -> float:
    """Recommended sampling temperature for a model family.

    DeepSeek-family models run at 0.6; Llama and everything else at 0.7.
    """
    return 0.6 if "deepseek" in model.lower() else 0.7


@dataclass(frozen=True)
class PromptTemplate:
    """A named prompt with exactly one body-insertion slot."""

    name: str
    text: str

    def __post_init__(self) -> None:
        slots = self.text.count(BODY_SLOT)
        if slots != 1:
            raise InvalidTemplate(
                f"template {self.name!r} has {slots} {BODY_SLOT} slots, expected 1"
            )

    def render(self, body: str) -> str:
        """Insert the document body; no other part of the template changes."""
        return self.text.replace(BODY_SLOT, body)


def _template_dir():
    return resources.files("caseline.templates")


def list_templates() -> list[str]:
    """Names of the shipped templates, sorted."""
    return sorted(
        entry.name[: -len(".txt")]
        for entry in _template_dir().iterdir()
        if entry.name.endswith(".txt")
    )


def load_template(name: str) -> PromptTemplate:
    """Load a shipped template by name (for example "timeline").

    Raises:
        InvalidTemplate: Unknown name, or the file violates the single-slot
            invariant.
    """
    entry = _template_dir() / f"{name}.txt"
    try:
        text = entry.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise InvalidTemplate(
            f"unknown template {name!r}; shipped templates: {', '.join(list_templates())}"
        ) from None
    return PromptTemplate(name=name, text=text)


def load_template_file(path: str | Path) -> PromptTemplate:
    """Load a template from an arbitrary file; the stem becomes its name."""
    path = Path(path)
    return PromptTemplate(name=path.stem, text=path.read_text(encoding="utf-8"))


class CompletionBackend(Protocol):
    """Contract every completion backend satisfies."""

    def complete(
        self, prompt: str, *, case_id: str | None = None, task: str | None = None
    ) -> str:
        """Return the raw completion text for a prompt.

        ``case_id`` and ``task`` identify the request for audit and replay;
        live backends may ignore them.
        """
        ...


@dataclass
class HttpBackend:
    """Chat-completion client with bounded retry and exponential backoff.

    Timeouts, connection errors, HTTP 429, and 5xx replies are retried up to
    ``max_retries`` times, sleeping ``backoff_base * 2**attempt`` seconds
    between attempts. Other 4xx replies fail immediately. The bearer token is
    read from ``LLM_API_KEY`` at request time; when unset, no Authorization
    header is sent (local endpoints commonly run without auth).
    """

    endpoint: str
    model: str = DEFAULT_MODEL
    temperature: float | None = None
    timeout_seconds: float = 120.0
    max_retries: int = 4
    backoff_base: float = 1.0
    session: requests.Session = field(default_factory=requests.Session, repr=False)
    sleep: Callable[[float], None] = field(default=time.sleep, repr=False)

    def complete(
        self, prompt: str, *, case_id: str | None = None, task: str | None = None
    ) -> str:
        payload = {
            "model": self.model,
            "temperature": (
                default_temperature(self.model)
                if self.temperature is None
                else self.temperature
            ),
            "messages": [{"role": "user", "content": prompt}],
        }
        headers = {}
        api_key = os.environ.get("LLM_API_KEY")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        last_error = "no attempt made"
        for attempt in range(self.max_retries + 1):
            if attempt:
                self.sleep(self.backoff_base * 2 ** (attempt - 1))
            try:
                response = self.session.post(
                    self.endpoint,
                    json=payload,
                    headers=headers,
                    timeout=self.timeout_seconds,
                )
            except (requests.Timeout, requests.ConnectionError) as exc:
                last_error = f"transport failure: {exc}"
                logger.warning("attempt %d failed (%s)", attempt + 1, last_error)
                continue
            if response.status_code == 200:
                return self._completion_text(response)
            if response.status_code in RETRYABLE_STATUS or response.status_code >= 500:
                last_error = f"HTTP {response.status_code}"
                logger.warning("attempt %d failed (%s)", attempt + 1, last_error)
                continue
            raise LlmFailure(
                f"HTTP {response.status_code} from {self.endpoint}: "
                f"{response.text[:200]}"
            )
        raise LlmFailure(
            f"giving up after {self.max_retries + 1} attempts; last error: {last_error}"
        )

    @staticmethod
    def _completion_text(response: requests.Response) -> str:
        try:
            data = response.json()
            choice = data["choices"][0]
        except (ValueError, LookupError, TypeError) as exc:
            raise LlmFailure(f"malformed completion response: {exc}") from exc
        message = choice.get("message")
        if isinstance(message, dict) and isinstance(message.get("content"), str):
            return message["content"]
        if isinstance(choice.get("text"), str):
            return choice["text"]
        raise LlmFailure("completion response carries no text content")


@dataclass(frozen=True)
class ReplayBackend:
    """Replays recorded replies from ``<dir>/<case_id>.<task>.txt`` files.

    Used by ``--mock-backend`` for offline, deterministic pipeline runs.
    """

    directory: Path

    def __post_init__(self) -> None:
        object.__setattr__(self, "directory", Path(self.directory))

    def complete(
        self, prompt: str, *, case_id: str | None = None, task: str | None = None
    ) -> str:
        if not case_id or not task:
            raise LlmFailure("replay backend needs a case_id and task per request")
        path = self.directory / f"{case_id}.{task}.txt"
        try:
            return path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise LlmFailure(f"no recorded reply at {path}") from None


@dataclass
class StaticBackend:
    """Returns one canned reply and records every call; test helper."""

    reply: str
    calls: list[tuple[str, str | None, str | None]] = field(default_factory=list)

    def complete(
        self, prompt: str, *, case_id: str | None = None, task: str | None = None
    ) -> str:
        self.calls.append((prompt, case_id, task))
        return self.reply
