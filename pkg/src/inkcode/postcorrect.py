"""LLM post-correction of OCR output.

Three strategies: Simple (one strict-rule prompt), ChainOfThought (three
sequential exchanges), and MultimodalEndToEnd (image straight to code).
Prompt texts live in versioned template files under ``templates/``; each
template is plain text split into sections by ``=== name ===`` delimiter
lines, with a single ``{code}`` placeholder for the code payload where one
is needed. Clients are abstract; deterministic mocks cover tests.
"""

from __future__ import annotations

import base64
import enum
import functools
import importlib.resources
import json
import logging
import os
import re
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

import httpx

logger = logging.getLogger(__name__)

DEFAULT_TEMPERATURE = 0.0
DEFAULT_MODEL_ID = "mock-echo"

SIMPLE_TEMPLATE = "simple_v1.txt"
COT_TEMPLATE = "chain_of_thought_v1.txt"
MULTIMODAL_TEMPLATE = "multimodal_v1.txt"

_SECTION_DELIMITER = re.compile(r"^=== (\w+) ===$")
_FENCE_OPENER = re.compile(r"```[A-Za-z0-9_+-]*")


class NoCodeBlockError(RuntimeError):
    """The reply contains no fenced code block."""


class CorrectionFailedError(RuntimeError):
    """The chat client failed at one step of a correction flow."""

    def __init__(self, step: int, cause: Exception):
        super().__init__(f"correction failed at step {step}: {cause}")
        self.step = step
        self.cause = cause


class ChatClientError(RuntimeError):
    """Transport or protocol failure talking to a chat model backend."""


class CorrectionKind(enum.Enum):
    SIMPLE = "simple"
    CHAIN_OF_THOUGHT = "chain_of_thought"
    MULTIMODAL_END_TO_END = "multimodal_end_to_end"
    NONE = "none"


@dataclass(frozen=True)
class CorrectionStrategy:
    kind: CorrectionKind
    model_id: str = DEFAULT_MODEL_ID
    temperature: float = DEFAULT_TEMPERATURE


@dataclass(frozen=True)
class ChatTurn:
    """One message in a chat conversation.

    Image attachments are only valid on user turns. Content must carry
    something: non-empty text, an image, or both.
    """

    role: str
    content: str
    image: bytes | None = None
    image_media_type: str | None = None

    def __post_init__(self) -> None:
        if self.role not in ("system", "user", "assistant"):
            raise ValueError(f"unknown role {self.role!r}")
        if not self.content and self.image is None:
            raise ValueError("turn must carry text or an image")
        if self.image is not None:
            if self.role != "user":
                raise ValueError("image attachments are only allowed on user turns")
            if not self.image_media_type:
                raise ValueError("image turns must state their media type")


class ChatClient(Protocol):
    supports_images: bool

    def complete(
        self, turns: Sequence[ChatTurn], *, model_id: str, temperature: float
    ) -> str: ...


@functools.lru_cache(maxsize=None)
def load_template(name: str) -> dict[str, str]:
    """Read a template file into its named sections.

    Sections are delimited by ``=== name ===`` lines; section bodies keep
    interior newlines and drop one trailing newline.
    """
    text = (
        importlib.resources.files("inkcode").joinpath("templates").joinpath(name).read_text(
            encoding="utf-8"
        )
    )
    sections: dict[str, str] = {}
    current: str | None = None
    buffer: list[str] = []
    for line in text.split("\n"):
        match = _SECTION_DELIMITER.match(line)
        if match:
            if current is not None:
                sections[current] = "\n".join(buffer).rstrip("\n")
            current = match.group(1)
            buffer = []
        elif current is not None:
            buffer.append(line)
        elif line.strip():
            raise ValueError(f"template {name}: content before the first section")
    if current is not None:
        sections[current] = "\n".join(buffer).rstrip("\n")
    if not sections:
        raise ValueError(f"template {name}: no sections found")
    return sections


def _fill_code(template_text: str, code: str) -> str:
    # Literal replacement, not str.format: code payloads may contain braces.
    if template_text.count("{code}") != 1:
        raise ValueError("template section must contain exactly one {code} placeholder")
    return template_text.replace("{code}", code)


def build_simple_prompt(code: str) -> list[ChatTurn]:
    """System turn plus one user turn carrying the code, the strict no-fix
    rules, and the fenced-output instruction."""
    if not code:
        raise ValueError("code must be non-empty")
    sections = load_template(SIMPLE_TEMPLATE)
    return [
        ChatTurn(role="system", content=sections["system"]),
        ChatTurn(role="user", content=_fill_code(sections["user"], code)),
    ]


def extract_code_block(reply: str) -> str:
    """Contents of the first fenced code block in the reply.

    Fences are lines of ``` with an optional language word; inner newlines
    are preserved. Additional blocks are ignored with a warning.
    """
    blocks: list[str] = []
    lines = reply.split("\n")
    i = 0
    while i < len(lines):
        stripped = lines[i].strip()
        if _FENCE_OPENER.fullmatch(stripped):
            j = i + 1
            while j < len(lines) and lines[j].strip() != "```":
                j += 1
            if j < len(lines):
                blocks.append("\n".join(lines[i + 1 : j]))
                i = j + 1
                continue
        i += 1
    if not blocks:
        raise NoCodeBlockError("reply contains no fenced code block")
    if len(blocks) > 1:
        logger.warning("reply contained %d fenced blocks; using the first", len(blocks))
    return blocks[0]


def run_simple_correction(
    code: str,
    client: ChatClient,
    *,
    model_id: str = DEFAULT_MODEL_ID,
    temperature: float = DEFAULT_TEMPERATURE,
) -> str:
    turns = build_simple_prompt(code)
    try:
        reply = client.complete(turns, model_id=model_id, temperature=temperature)
    except Exception as exc:
        raise CorrectionFailedError(step=1, cause=exc) from exc
    return extract_code_block(reply)


def run_cot_correction(
    code: str,
    client: ChatClient,
    *,
    model_id: str = DEFAULT_MODEL_ID,
    temperature: float = DEFAULT_TEMPERATURE,
) -> str:
    """Three sequential exchanges: fix spelling only, undo inadvertent logical
    fixes, keep the original indentation. Each exchange sees the full prior
    conversation; the final reply's code block is the result."""
    if not code:
        raise ValueError("code must be non-empty")
    sections = load_template(COT_TEMPLATE)
    turns: list[ChatTurn] = [ChatTurn(role="system", content=sections["system"])]
    reply = ""
    for step in (1, 2, 3):
        body = sections[f"step{step}"]
        if step == 1:
            body = _fill_code(body, code)
        turns.append(ChatTurn(role="user", content=body))
        try:
            reply = client.complete(turns, model_id=model_id, temperature=temperature)
        except Exception as exc:
            raise CorrectionFailedError(step=step, cause=exc) from exc
        turns.append(ChatTurn(role="assistant", content=reply))
    return extract_code_block(reply)


def run_multimodal(
    image: bytes,
    client: ChatClient,
    *,
    model_id: str = DEFAULT_MODEL_ID,
    temperature: float = DEFAULT_TEMPERATURE,
    media_type: str = "image/png",
) -> str:
    """One user turn: the photo plus the strict transcription instructions.
    Returns the extracted code block of the single reply."""
    if not image:
        raise ValueError("image must be non-empty")
    if not getattr(client, "supports_images", False):
        raise ValueError("client/model is not image-capable")
    sections = load_template(MULTIMODAL_TEMPLATE)
    turns = [
        ChatTurn(
            role="user",
            content=sections["user"],
            image=image,
            image_media_type=media_type,
        )
    ]
    try:
        reply = client.complete(turns, model_id=model_id, temperature=temperature)
    except Exception as exc:
        raise CorrectionFailedError(step=1, cause=exc) from exc
    return extract_code_block(reply)


def run_correction(
    strategy: CorrectionStrategy,
    client: ChatClient | None,
    *,
    code: str | None = None,
    image: bytes | None = None,
    media_type: str = "image/png",
) -> str:
    """Dispatch one correction strategy. NONE is the identity on code."""
    if strategy.kind is CorrectionKind.NONE:
        if code is None:
            raise ValueError("NONE strategy needs code")
        return code
    if client is None:
        raise ValueError(f"strategy {strategy.kind.value} needs a chat client")
    if strategy.kind is CorrectionKind.SIMPLE:
        if code is None:
            raise ValueError("simple strategy needs code")
        return run_simple_correction(
            code, client, model_id=strategy.model_id, temperature=strategy.temperature
        )
    if strategy.kind is CorrectionKind.CHAIN_OF_THOUGHT:
        if code is None:
            raise ValueError("chain-of-thought strategy needs code")
        return run_cot_correction(
            code, client, model_id=strategy.model_id, temperature=strategy.temperature
        )
    if strategy.kind is CorrectionKind.MULTIMODAL_END_TO_END:
        if image is None:
            raise ValueError("multimodal strategy needs the image")
        return run_multimodal(
            image,
            client,
            model_id=strategy.model_id,
            temperature=strategy.temperature,
            media_type=media_type,
        )
    raise ValueError(f"unknown strategy kind {strategy.kind!r}")


class EchoChatClient:
    """Deterministic mock: replies with the last fenced code block seen in the
    conversation, re-fenced. Makes every text strategy the identity."""

    supports_images = False

    def complete(
        self,
        turns: Sequence[ChatTurn],
        *,
        model_id: str = DEFAULT_MODEL_ID,
        temperature: float = DEFAULT_TEMPERATURE,
    ) -> str:
        for turn in reversed(turns):
            try:
                code = extract_code_block(turn.content)
            except NoCodeBlockError:
                continue
            return f"```python\n{code}\n```"
        return "There is no code in the conversation."


class ScriptedChatClient:
    """Mock that plays back a fixed list of replies, recording every call."""

    def __init__(self, replies: Sequence[str], *, supports_images: bool = True):
        self._replies = list(replies)
        self._next = 0
        self.supports_images = supports_images
        self.calls: list[tuple[tuple[ChatTurn, ...], str, float]] = []

    @classmethod
    def from_file(cls, path: Path, **kwargs) -> "ScriptedChatClient":
        replies = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(replies, list) or not all(isinstance(r, str) for r in replies):
            raise ValueError(f"{path}: script must be a JSON list of reply strings")
        return cls(replies, **kwargs)

    def complete(
        self,
        turns: Sequence[ChatTurn],
        *,
        model_id: str = DEFAULT_MODEL_ID,
        temperature: float = DEFAULT_TEMPERATURE,
    ) -> str:
        self.calls.append((tuple(turns), model_id, temperature))
        if self._next >= len(self._replies):
            raise ChatClientError(f"script exhausted after {len(self._replies)} replies")
        reply = self._replies[self._next]
        self._next += 1
        return reply


class HttpChatClient:
    """Chat-completions HTTP backend (OpenAI-style wire format).

    The API key is read from the named environment variable at call time.
    In-flight requests are capped (default 2) to respect rate limits.
    """

    def __init__(
        self,
        endpoint: str,
        credential_env: str,
        *,
        supports_images: bool = False,
        max_in_flight: int = 2,
        timeout_seconds: float = 60.0,
        transport: httpx.BaseTransport | None = None,
    ):
        if max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")
        self.endpoint = endpoint
        self.credential_env = credential_env
        self.supports_images = supports_images
        self._semaphore = threading.BoundedSemaphore(max_in_flight)
        self._client = httpx.Client(timeout=timeout_seconds, transport=transport)

    def _encode_turn(self, turn: ChatTurn) -> dict:
        if turn.image is None:
            return {"role": turn.role, "content": turn.content}
        data_url = (
            f"data:{turn.image_media_type};base64,"
            + base64.b64encode(turn.image).decode("ascii")
        )
        parts = []
        if turn.content:
            parts.append({"type": "text", "text": turn.content})
        parts.append({"type": "image_url", "image_url": {"url": data_url}})
        return {"role": turn.role, "content": parts}

    def complete(
        self,
        turns: Sequence[ChatTurn],
        *,
        model_id: str,
        temperature: float = DEFAULT_TEMPERATURE,
    ) -> str:
        key = os.environ.get(self.credential_env)
        if not key:
            raise ChatClientError(
                f"environment variable {self.credential_env} is not set"
            )
        payload = {
            "model": model_id,
            "temperature": temperature,
            "messages": [self._encode_turn(turn) for turn in turns],
        }
        try:
            with self._semaphore:
                response = self._client.post(
                    self.endpoint,
                    json=payload,
                    headers={"Authorization": f"Bearer {key}"},
                )
        except httpx.HTTPError as exc:
            raise ChatClientError(f"chat backend unreachable: {exc}") from exc
        if response.status_code != 200:
            raise ChatClientError(
                f"chat backend returned {response.status_code}: {response.text[:200]}"
            )
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, json.JSONDecodeError) as exc:
            raise ChatClientError(f"malformed chat backend response: {exc}") from exc

    def close(self) -> None:
        self._client.close()
