"""Pipeline configuration and composition.

A pipeline config picks exactly one choice per stage and serializes to one
JSON schema (paths are relative to the config file):

    {
      "config_id": "replay-relative-echo-simple",
      "label": "Replay + Relative + Simple",
      "section": "Post Correction",
      "ocr": {"kind": "fixtures", "root": "../data/synthetic/fixtures"}
           | {"kind": "remote", "provider_id": "...", "endpoint": "https://...",
              "credential_env": "MY_OCR_KEY", "timeout_seconds": 30,
              "retry_limit": 2, "response_schema": "generic", "concurrency": 4},
      "indent": {"mode": "none" | "absolute" | "relative",
                 "gmm": "default" | {...GmmParams object...}},
      "correction": {
        "strategy": "none" | "simple" | "chain_of_thought" | "multimodal_end_to_end",
        "model_id": "mock-echo",
        "temperature": 0.0,
        "client": {"kind": "echo"}
                | {"kind": "scripted", "script": "replies.json"}
                | {"kind": "http", "endpoint": "https://...",
                   "credential_env": "MY_LLM_KEY", "supports_images": false}
      }
    }
"""

from __future__ import annotations

import enum
import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from ..codemodel import (
    IndentedLine,
    IndentedProgram,
    OcrDocument,
    PipelineResult,
    StageTiming,
    normalize_reading_order,
    render_program,
)
from ..indent_absolute import absolute_indent
from ..indent_relative import DEFAULT_GMM_PARAMS, GmmParams, relative_indent
from ..ocr_adapters import OcrProvider, ProviderConfig, RemoteProvider, ReplayProvider
from ..postcorrect import (
    ChatClient,
    CorrectionKind,
    CorrectionStrategy,
    EchoChatClient,
    HttpChatClient,
    ScriptedChatClient,
    run_correction,
)


class InvalidConfigError(ValueError):
    """Pipeline config violates the schema."""


class IndentMode(enum.Enum):
    NONE = "none"
    ABSOLUTE = "absolute"
    RELATIVE = "relative"


@dataclass(frozen=True)
class FixtureSource:
    root: Path


@dataclass(frozen=True)
class RemoteSource:
    provider: ProviderConfig


@dataclass(frozen=True)
class EchoClientSpec:
    pass


@dataclass(frozen=True)
class ScriptedClientSpec:
    script_path: Path


@dataclass(frozen=True)
class HttpClientSpec:
    endpoint: str
    credential_env: str
    supports_images: bool = False


ClientSpec = EchoClientSpec | ScriptedClientSpec | HttpClientSpec


@dataclass(frozen=True)
class PipelineConfig:
    """One fully specified pipeline: OCR source, indent method, correction."""

    config_id: str
    label: str
    section: str
    ocr: FixtureSource | RemoteSource
    indent_mode: IndentMode
    gmm: GmmParams | None  # RELATIVE only; None means the shipped defaults
    strategy: CorrectionStrategy
    client_spec: ClientSpec | None  # None only valid with the NONE strategy

    def __post_init__(self) -> None:
        if not self.config_id:
            raise ValueError("config_id must be non-empty")
        if self.gmm is not None and self.indent_mode is not IndentMode.RELATIVE:
            raise ValueError("gmm params are only meaningful with relative indent")
        if self.strategy.kind is not CorrectionKind.NONE and self.client_spec is None:
            raise ValueError(f"strategy {self.strategy.kind.value} needs a client")


def _parse_ocr(raw: Any, base: Path) -> FixtureSource | RemoteSource:
    if not isinstance(raw, dict) or "kind" not in raw:
        raise InvalidConfigError("ocr section must be an object with a 'kind'")
    kind = raw["kind"]
    if kind == "fixtures":
        if "root" not in raw:
            raise InvalidConfigError("fixtures ocr needs a 'root' directory")
        return FixtureSource(root=(base / raw["root"]).resolve())
    if kind == "remote":
        try:
            provider = ProviderConfig(
                provider_id=raw["provider_id"],
                endpoint=raw["endpoint"],
                credential_env=raw["credential_env"],
                timeout_seconds=float(raw.get("timeout_seconds", 30.0)),
                retry_limit=int(raw.get("retry_limit", 2)),
                response_schema=raw.get("response_schema", "generic"),
                concurrency=int(raw.get("concurrency", 4)),
            )
        except (KeyError, ValueError) as exc:
            raise InvalidConfigError(f"remote ocr: {exc}") from exc
        return RemoteSource(provider=provider)
    raise InvalidConfigError(f"unknown ocr kind {kind!r}")


def _parse_indent(raw: Any) -> tuple[IndentMode, GmmParams | None]:
    if not isinstance(raw, dict) or "mode" not in raw:
        raise InvalidConfigError("indent section must be an object with a 'mode'")
    try:
        mode = IndentMode(raw["mode"])
    except ValueError:
        raise InvalidConfigError(f"unknown indent mode {raw['mode']!r}") from None
    gmm = None
    if mode is IndentMode.RELATIVE:
        spec = raw.get("gmm", "default")
        if spec == "default":
            gmm = None
        elif isinstance(spec, dict):
            try:
                gmm = GmmParams.from_json_dict(spec)
            except ValueError as exc:
                raise InvalidConfigError(f"gmm: {exc}") from exc
        else:
            raise InvalidConfigError("gmm must be 'default' or a params object")
    elif "gmm" in raw:
        raise InvalidConfigError("gmm is only valid with relative indent")
    return mode, gmm


def _parse_correction(raw: Any, base: Path) -> tuple[CorrectionStrategy, ClientSpec | None]:
    if not isinstance(raw, dict) or "strategy" not in raw:
        raise InvalidConfigError("correction section must be an object with a 'strategy'")
    try:
        kind = CorrectionKind(raw["strategy"])
    except ValueError:
        raise InvalidConfigError(f"unknown strategy {raw['strategy']!r}") from None
    strategy = CorrectionStrategy(
        kind=kind,
        model_id=raw.get("model_id", "mock-echo"),
        temperature=float(raw.get("temperature", 0.0)),
    )
    if kind is CorrectionKind.NONE:
        return strategy, None
    client_raw = raw.get("client")
    if not isinstance(client_raw, dict) or "kind" not in client_raw:
        raise InvalidConfigError("correction needs a 'client' object with a 'kind'")
    client_kind = client_raw["kind"]
    if client_kind == "echo":
        return strategy, EchoClientSpec()
    if client_kind == "scripted":
        if "script" not in client_raw:
            raise InvalidConfigError("scripted client needs a 'script' path")
        return strategy, ScriptedClientSpec(script_path=(base / client_raw["script"]).resolve())
    if client_kind == "http":
        try:
            return strategy, HttpClientSpec(
                endpoint=client_raw["endpoint"],
                credential_env=client_raw["credential_env"],
                supports_images=bool(client_raw.get("supports_images", False)),
            )
        except KeyError as exc:
            raise InvalidConfigError(f"http client missing {exc.args[0]!r}") from exc
    raise InvalidConfigError(f"unknown client kind {client_kind!r}")


def load_pipeline_config(path: Path) -> PipelineConfig:
    path = Path(path)
    base = path.parent
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidConfigError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise InvalidConfigError(f"{path}: config must be an object")
    for key in ("config_id", "ocr", "indent", "correction"):
        if key not in raw:
            raise InvalidConfigError(f"{path}: missing {key!r}")
    indent_mode, gmm = _parse_indent(raw["indent"])
    strategy, client_spec = _parse_correction(raw["correction"], base)
    try:
        return PipelineConfig(
            config_id=raw["config_id"],
            label=raw.get("label", raw["config_id"]),
            section=raw.get("section", ""),
            ocr=_parse_ocr(raw["ocr"], base),
            indent_mode=indent_mode,
            gmm=gmm,
            strategy=strategy,
            client_spec=client_spec,
        )
    except ValueError as exc:
        raise InvalidConfigError(f"{path}: {exc}") from exc


def make_provider(config: PipelineConfig) -> OcrProvider:
    if isinstance(config.ocr, FixtureSource):
        return ReplayProvider(config.ocr.root)
    return RemoteProvider(config.ocr.provider)


def make_client(config: PipelineConfig) -> ChatClient | None:
    spec = config.client_spec
    if spec is None:
        return None
    if isinstance(spec, EchoClientSpec):
        return EchoChatClient()
    if isinstance(spec, ScriptedClientSpec):
        return ScriptedChatClient.from_file(spec.script_path)
    return HttpChatClient(
        spec.endpoint, spec.credential_env, supports_images=spec.supports_images
    )


def apply_indent(doc: OcrDocument, config: PipelineConfig) -> IndentedProgram:
    if config.indent_mode is IndentMode.ABSOLUTE:
        return absolute_indent(doc)
    if config.indent_mode is IndentMode.RELATIVE:
        return relative_indent(doc, config.gmm or DEFAULT_GMM_PARAMS)
    # No indentation recognition: every line at the margin.
    return IndentedProgram(lines=tuple(IndentedLine(text=line.text, level=0) for line in doc.lines))


def run_pipeline(
    image: bytes,
    config: PipelineConfig,
    *,
    provider: OcrProvider,
    client: ChatClient | None,
    media_type: str = "image/png",
) -> PipelineResult:
    """OCR, indent, correct: one image through one configured pipeline."""
    timings: list[StageTiming] = []

    start = time.perf_counter()
    doc = normalize_reading_order(provider.recognize(image, media_type))
    timings.append(StageTiming("ocr", time.perf_counter() - start))

    start = time.perf_counter()
    program = apply_indent(doc, config)
    rendered = render_program(program)
    timings.append(StageTiming("indent", time.perf_counter() - start))

    start = time.perf_counter()
    corrected = run_correction(
        config.strategy, client, code=rendered, image=image, media_type=media_type
    )
    timings.append(StageTiming("correct", time.perf_counter() - start))

    return PipelineResult(
        raw_ocr=doc,
        indented=program,
        corrected_code=corrected,
        config_id=config.config_id,
        stage_timings=tuple(timings),
    )
