"""Core value types shared by every pipeline stage.

The OCR stage produces an :class:`OcrDocument` (text lines with bounding
boxes), the indentation stage turns it into an :class:`IndentedProgram`
(text lines with discrete indent levels), and rendering flattens that into
plain source text for post-correction and metrics.

All types are immutable values; the operations are pure functions, so they
are safe to share across any number of concurrent workers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable

# Canonical indent unit. Gold transcriptions are stored in this form so that
# edit distances over rendered programs are well defined.
INDENT_UNIT = "    "


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box in image pixel coordinates.

    Coordinates are non-negative reals with ``x_min <= x_max`` and
    ``y_min <= y_max``. Quadrilateral provider outputs must be collapsed to
    axis-aligned envelopes before they reach this type.
    """

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self) -> None:
        for name in ("x_min", "y_min", "x_max", "y_max"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and non-negative, got {value!r}")
            object.__setattr__(self, name, value)
        if self.x_min > self.x_max:
            raise ValueError(f"x_min {self.x_min} exceeds x_max {self.x_max}")
        if self.y_min > self.y_max:
            raise ValueError(f"y_min {self.y_min} exceeds y_max {self.y_max}")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    def to_json_dict(self) -> dict[str, float]:
        return {
            "x_min": self.x_min,
            "y_min": self.y_min,
            "x_max": self.x_max,
            "y_max": self.y_max,
        }

    @classmethod
    def from_json_dict(cls, data: dict[str, Any]) -> "BoundingBox":
        try:
            return cls(
                x_min=float(data["x_min"]),
                y_min=float(data["y_min"]),
                x_max=float(data["x_max"]),
                y_max=float(data["y_max"]),
            )
        except KeyError as exc:
            raise ValueError(f"bounding box missing field {exc.args[0]!r}") from exc


@dataclass(frozen=True)
class LineBox:
    """One OCR line: raw transcription text plus its bounding box.

    ``text`` is the provider's transcription verbatim; it may be empty.
    Adapters never trim or re-case it.
    """

    text: str
    box: BoundingBox

    def __post_init__(self) -> None:
        if not isinstance(self.text, str):
            raise ValueError(f"line text must be a string, got {type(self.text).__name__}")

    def to_json_dict(self) -> dict[str, Any]:
        return {"text": self.text, "box": self.box.to_json_dict()}

    @classmethod
    def from_json_dict(cls, data: dict[str, Any]) -> "LineBox":
        try:
            return cls(text=data["text"], box=BoundingBox.from_json_dict(data["box"]))
        except KeyError as exc:
            raise ValueError(f"line missing field {exc.args[0]!r}") from exc


@dataclass(frozen=True)
class OcrDocument:
    """Recognized text of one photographed program.

    ``lines`` is ordered; after :func:`normalize_reading_order` it is sorted
    top to bottom (ties left to right). ``image_width`` is the denominator
    for the width-normalized deltas used by relative indentation.
    """

    lines: tuple[LineBox, ...]
    image_width: float
    image_height: float
    provider_id: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "lines", tuple(self.lines))
        if not all(isinstance(line, LineBox) for line in self.lines):
            raise ValueError("lines must contain LineBox values")
        for name in ("image_width", "image_height"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be finite and positive, got {value!r}")
        if not isinstance(self.provider_id, str) or not self.provider_id:
            raise ValueError("provider_id must be a non-empty string")

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "image_width": self.image_width,
            "image_height": self.image_height,
            "provider_id": self.provider_id,
            "lines": [line.to_json_dict() for line in self.lines],
        }

    @classmethod
    def from_json_dict(cls, data: dict[str, Any]) -> "OcrDocument":
        try:
            lines = tuple(LineBox.from_json_dict(entry) for entry in data["lines"])
            return cls(
                lines=lines,
                image_width=data["image_width"],
                image_height=data["image_height"],
                provider_id=data["provider_id"],
            )
        except KeyError as exc:
            raise ValueError(f"document missing field {exc.args[0]!r}") from exc

    def to_canonical_json(self) -> str:
        """Serialize to the canonical fixture form: stable key order, two-space
        indent, trailing newline. Re-serializing a parsed document reproduces
        the bytes exactly."""
        return json.dumps(self.to_json_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "OcrDocument":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ValueError("document JSON must be an object")
        return cls.from_json_dict(data)


@dataclass(frozen=True)
class IndentedLine:
    """One program line with its reconstructed indent level."""

    text: str
    level: int

    def __post_init__(self) -> None:
        if not isinstance(self.level, int) or isinstance(self.level, bool) or self.level < 0:
            raise ValueError(f"level must be a non-negative integer, got {self.level!r}")


@dataclass(frozen=True)
class IndentedProgram:
    """Ordered program lines with discrete indent levels.

    Levels are validated to be non-negative. The stricter nesting shape
    (first line at level 0, no upward jumps of more than one) is guaranteed
    by the relative reconstruction algorithm and checked via
    :meth:`follows_nesting_rules`; absolute clustering can violate it on
    unusual layouts, which is a known limitation of that method.
    """

    lines: tuple[IndentedLine, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "lines", tuple(self.lines))
        if not all(isinstance(line, IndentedLine) for line in self.lines):
            raise ValueError("lines must contain IndentedLine values")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, int]]) -> "IndentedProgram":
        return cls(lines=tuple(IndentedLine(text, level) for text, level in pairs))

    def as_pairs(self) -> list[tuple[str, int]]:
        return [(line.text, line.level) for line in self.lines]

    def follows_nesting_rules(self) -> bool:
        """True when the first line sits at level 0 and no line is indented
        more than one level past its predecessor."""
        previous = 0
        for i, line in enumerate(self.lines):
            if i == 0:
                if line.level != 0:
                    return False
            elif line.level > previous + 1:
                return False
            previous = line.level
        return True

    def to_json_dict(self) -> dict[str, Any]:
        return {"lines": [{"text": line.text, "level": line.level} for line in self.lines]}

    @classmethod
    def from_json_dict(cls, data: dict[str, Any]) -> "IndentedProgram":
        return cls(lines=tuple(IndentedLine(entry["text"], entry["level"]) for entry in data["lines"]))


@dataclass(frozen=True)
class StageTiming:
    """Wall-clock duration of one pipeline stage."""

    stage: str
    seconds: float


@dataclass(frozen=True)
class PipelineResult:
    """Everything one pipeline run produced, keyed by the config that ran it.

    ``corrected_code`` is the final artifact; earlier stage outputs are kept
    so reviewers can audit each step. ``stage_timings`` records every stage
    that ran, in execution order.
    """

    raw_ocr: OcrDocument
    indented: IndentedProgram
    corrected_code: str
    config_id: str
    stage_timings: tuple[StageTiming, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "stage_timings", tuple(self.stage_timings))

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "raw_ocr": self.raw_ocr.to_json_dict(),
            "indented": self.indented.to_json_dict(),
            "corrected_code": self.corrected_code,
            "config_id": self.config_id,
            "stage_timings": [
                {"stage": t.stage, "seconds": t.seconds} for t in self.stage_timings
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict[str, Any]) -> "PipelineResult":
        return cls(
            raw_ocr=OcrDocument.from_json_dict(data["raw_ocr"]),
            indented=IndentedProgram.from_json_dict(data["indented"]),
            corrected_code=data["corrected_code"],
            config_id=data["config_id"],
            stage_timings=tuple(
                StageTiming(entry["stage"], entry["seconds"]) for entry in data["stage_timings"]
            ),
        )


def normalize_reading_order(doc: OcrDocument) -> OcrDocument:
    """Sort lines into visual reading order: y_min ascending, ties broken by
    x_min ascending, stable for fully equal keys.

    Whitespace-only line texts are normalized to empty here (and only here);
    blank lines themselves are kept, they may carry blank-line semantics.
    """
    ordered = sorted(doc.lines, key=lambda line: (line.box.y_min, line.box.x_min))
    cleaned = tuple(
        LineBox(text="" if line.text.strip() == "" else line.text, box=line.box)
        for line in ordered
    )
    return OcrDocument(
        lines=cleaned,
        image_width=doc.image_width,
        image_height=doc.image_height,
        provider_id=doc.provider_id,
    )


def render_program(program: IndentedProgram, indent_unit: str = INDENT_UNIT) -> str:
    """Flatten an indented program to source text.

    Each line becomes ``indent_unit * level + text``; lines join with "\\n"
    and there is no trailing newline. An empty program renders to "".
    """
    if not indent_unit:
        raise ValueError("indent_unit must be non-empty")
    return "\n".join(indent_unit * line.level + line.text for line in program.lines)
