"""OCR provider adapters: a deterministic recorded-fixture replay provider and
a generic remote HTTP provider.

Adapters translate provider payloads into :class:`OcrDocument` values and do
nothing else: line texts pass through verbatim, quadrilateral geometry is
collapsed to axis-aligned boxes, and credentials are only ever named by
environment variable, never stored.
"""

from __future__ import annotations

import base64
import hashlib
import json
import math
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Protocol

import httpx

from .codemodel import BoundingBox, LineBox, OcrDocument

BACKOFF_BASE_SECONDS = 1.0
BACKOFF_FACTOR = 2.0

RESPONSE_SCHEMAS = ("generic", "quad_lines")


class ProviderUnavailableError(RuntimeError):
    """Provider could not produce a document (missing fixture, network or
    auth failure after retries)."""

    def __init__(self, message: str, attempts: int = 1):
        super().__init__(message)
        self.attempts = attempts


class ProviderProtocolError(RuntimeError):
    """Provider responded, but the payload does not match its schema."""


class InvalidFixtureError(ValueError):
    """Fixture file exists but violates the document invariants."""


class MissingCredentialError(RuntimeError):
    """The configured credential environment variable is not set."""


@dataclass(frozen=True)
class ProviderConfig:
    """Connection settings for one remote OCR backend.

    ``credential_env`` names the environment variable holding the API key;
    the key itself never appears in configs or fixtures. ``retry_limit``
    counts retries after the first attempt. ``concurrency`` caps in-flight
    requests per provider handle.
    """

    provider_id: str
    endpoint: str
    credential_env: str
    timeout_seconds: float = 30.0
    retry_limit: int = 2
    response_schema: str = "generic"
    concurrency: int = 4

    def __post_init__(self) -> None:
        if not self.provider_id:
            raise ValueError("provider_id must be non-empty")
        if self.timeout_seconds <= 0:
            raise ValueError("timeout_seconds must be positive")
        if self.retry_limit < 0:
            raise ValueError("retry_limit must be >= 0")
        if self.response_schema not in RESPONSE_SCHEMAS:
            raise ValueError(f"unknown response_schema {self.response_schema!r}")
        if self.concurrency < 1:
            raise ValueError("concurrency must be >= 1")


class OcrProvider(Protocol):
    def recognize(self, image: bytes, media_type: str = "image/png") -> OcrDocument: ...


def load_fixture(path: Path) -> OcrDocument:
    """Parse one recorded fixture. Invariant violations (negative width,
    malformed boxes) surface as InvalidFixtureError naming the file."""
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidFixtureError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise InvalidFixtureError(f"{path}: fixture must be a JSON object")
    try:
        return OcrDocument.from_json_dict(raw)
    except (ValueError, TypeError) as exc:
        raise InvalidFixtureError(f"{path}: {exc}") from exc


def record_fixture(doc: OcrDocument, path: Path) -> None:
    """Write the canonical JSON form. Recording, loading, and re-recording
    produces byte-identical files."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(doc.to_canonical_json(), encoding="utf-8")


class ReplayProvider:
    """Replays recorded documents keyed by the SHA-256 of the image bytes.

    Looks for ``<root>/<sha256>.json``; failing that, consults an optional
    ``<root>/index.json`` mapping hash to file name. Bit-deterministic: the
    same fixture always yields the same document.
    """

    provider_id = "replay"

    def __init__(self, fixtures_root: Path):
        self.fixtures_root = Path(fixtures_root)

    def recognize(self, image: bytes, media_type: str = "image/png") -> OcrDocument:
        if not image:
            raise ValueError("image must be non-empty")
        digest = hashlib.sha256(image).hexdigest()
        path = self.fixtures_root / f"{digest}.json"
        if not path.exists():
            index_path = self.fixtures_root / "index.json"
            if index_path.exists():
                index = json.loads(index_path.read_text(encoding="utf-8"))
                name = index.get(digest)
                if name is not None:
                    path = self.fixtures_root / name
        if not path.exists():
            raise ProviderUnavailableError(
                f"no fixture recorded for image sha256={digest} under {self.fixtures_root}",
                attempts=1,
            )
        return load_fixture(path)


def _parse_generic(payload: Any, provider_id: str) -> OcrDocument:
    # Payload is the canonical OcrDocument JSON object.
    if not isinstance(payload, dict):
        raise ProviderProtocolError("generic response must be a JSON object")
    try:
        doc = OcrDocument.from_json_dict(payload)
    except (ValueError, TypeError) as exc:
        raise ProviderProtocolError(f"malformed generic response: {exc}") from exc
    return OcrDocument(
        lines=doc.lines,
        image_width=doc.image_width,
        image_height=doc.image_height,
        provider_id=provider_id,
    )


def _parse_quad_lines(payload: Any, provider_id: str) -> OcrDocument:
    # Schema used by providers that return 4-point polygons per line:
    # {"width": W, "height": H, "lines": [{"text": str, "polygon": [x1,y1,...,x4,y4]}]}
    if not isinstance(payload, dict):
        raise ProviderProtocolError("quad_lines response must be a JSON object")
    try:
        width = payload["width"]
        height = payload["height"]
        raw_lines = payload["lines"]
    except KeyError as exc:
        raise ProviderProtocolError(f"quad_lines response missing {exc.args[0]!r}") from exc
    lines = []
    for i, entry in enumerate(raw_lines):
        try:
            text = entry["text"]
            polygon = entry["polygon"]
        except (KeyError, TypeError) as exc:
            raise ProviderProtocolError(f"line {i}: malformed entry: {exc}") from exc
        if len(polygon) != 8 or not all(math.isfinite(v) for v in polygon):
            raise ProviderProtocolError(f"line {i}: polygon must be 8 finite numbers")
        xs = polygon[0::2]
        ys = polygon[1::2]
        box = BoundingBox(x_min=min(xs), y_min=min(ys), x_max=max(xs), y_max=max(ys))
        lines.append(LineBox(text=text, box=box))
    try:
        return OcrDocument(
            lines=tuple(lines),
            image_width=width,
            image_height=height,
            provider_id=provider_id,
        )
    except (ValueError, TypeError) as exc:
        raise ProviderProtocolError(f"malformed quad_lines response: {exc}") from exc


_RESPONSE_PARSERS: dict[str, Callable[[Any, str], OcrDocument]] = {
    "generic": _parse_generic,
    "quad_lines": _parse_quad_lines,
}


class RemoteProvider:
    """Generic HTTP OCR backend.

    POSTs the image (base64) to the configured endpoint with a bearer token
    read from the environment, retries transient failures with exponential
    backoff (base 1 s, factor 2), and translates the response via the
    configured schema. Returned documents are in reading order with line
    texts untouched.
    """

    def __init__(
        self,
        config: ProviderConfig,
        *,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.config = config
        self._sleep = sleep
        self._semaphore = threading.BoundedSemaphore(config.concurrency)
        self._client = httpx.Client(timeout=config.timeout_seconds, transport=transport)

    @property
    def provider_id(self) -> str:
        return self.config.provider_id

    def _credential(self) -> str:
        value = os.environ.get(self.config.credential_env)
        if not value:
            raise MissingCredentialError(
                f"environment variable {self.config.credential_env} is not set"
            )
        return value

    def recognize(self, image: bytes, media_type: str = "image/png") -> OcrDocument:
        if not image:
            raise ValueError("image must be non-empty")
        body = {
            "image": base64.b64encode(image).decode("ascii"),
            "media_type": media_type,
        }
        headers = {"Authorization": f"Bearer {self._credential()}"}
        attempts = self.config.retry_limit + 1
        last_error: Exception | None = None
        for attempt in range(attempts):
            if attempt > 0:
                self._sleep(BACKOFF_BASE_SECONDS * BACKOFF_FACTOR ** (attempt - 1))
            try:
                with self._semaphore:
                    response = self._client.post(
                        self.config.endpoint, json=body, headers=headers
                    )
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = ProviderUnavailableError(
                    f"{self.config.provider_id} returned {response.status_code}"
                )
                continue
            if response.status_code >= 400:
                # Client errors (bad auth, bad request) will not improve on retry.
                raise ProviderUnavailableError(
                    f"{self.config.provider_id} rejected the request: "
                    f"{response.status_code} {response.text[:200]}",
                    attempts=attempt + 1,
                )
            try:
                payload = response.json()
            except json.JSONDecodeError as exc:
                raise ProviderProtocolError(
                    f"{self.config.provider_id} returned non-JSON body"
                ) from exc
            parser = _RESPONSE_PARSERS[self.config.response_schema]
            doc = parser(payload, self.config.provider_id)
            # Reading order only; text passes through verbatim (the whitespace
            # normalization step belongs to the pipeline, not the adapter).
            ordered = sorted(doc.lines, key=lambda line: (line.box.y_min, line.box.x_min))
            return OcrDocument(
                lines=tuple(ordered),
                image_width=doc.image_width,
                image_height=doc.image_height,
                provider_id=doc.provider_id,
            )
        raise ProviderUnavailableError(
            f"{self.config.provider_id} unavailable after {attempts} attempts: {last_error}",
            attempts=attempts,
        )

    def close(self) -> None:
        self._client.close()
