"""Dataset manifests.

A manifest is one JSON document listing entries; gold code lives in sidecar
files so diffs stay readable:

    {
      "entries": [
        {
          "program_id": "p01",
          "image": "images/p01.png",
          "gold": "gold/p01.py",
          "split": "correct",
          "heldout": true
        },
        {
          "program_id": "p45",
          "image": "images/p45.png",
          "gold": "gold/p45.py",
          "split": "logical_error",
          "heldout": true,
          "annotation": {
            "description": "loop misses the last value",
            "buggy_snippet": "range(1, n)",
            "fixed_snippet": "range(1, n + 1)",
            "category": "fence_post"
          }
        }
      ]
    }

Paths are relative to the manifest file. Entries in the logical_error split
must carry an annotation; entries in the correct split must not.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from ..metrics import canonicalize


class InvalidManifestError(ValueError):
    """Manifest violates the schema; names the offending entry and field."""

    def __init__(self, message: str, *, entry: str | int | None = None, field: str | None = None):
        parts = []
        if entry is not None:
            parts.append(f"entry {entry}")
        if field is not None:
            parts.append(f"field {field!r}")
        prefix = ", ".join(parts)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.entry = entry
        self.field = field


class Split(enum.Enum):
    CORRECT = "correct"
    LOGICAL_ERROR = "logical_error"


class ErrorCategory(enum.Enum):
    FENCE_POST = "fence_post"
    ARITHMETIC = "arithmetic"
    CONTROL_FLOW = "control_flow"
    SCOPE = "scope"
    OTHER = "other"


@dataclass(frozen=True)
class ErrorAnnotation:
    """One planted logical error: what the student wrote, what the repaired
    form looks like, and its category."""

    description: str
    buggy_snippet: str
    fixed_snippet: str
    category: ErrorCategory

    def __post_init__(self) -> None:
        if not self.buggy_snippet:
            raise ValueError("buggy_snippet must be non-empty")
        if self.buggy_snippet == self.fixed_snippet:
            raise ValueError("buggy_snippet and fixed_snippet must differ")


@dataclass(frozen=True)
class DatasetEntry:
    program_id: str
    image_path: Path
    gold_code: str  # canonical form (metrics.canonicalize applied at load)
    split: Split
    heldout: bool
    annotation: ErrorAnnotation | None

    def __post_init__(self) -> None:
        if not self.gold_code:
            raise ValueError("gold_code must be non-empty")
        if self.split is Split.LOGICAL_ERROR and self.annotation is None:
            raise ValueError("logical_error entries must carry an annotation")
        if self.split is Split.CORRECT and self.annotation is not None:
            raise ValueError("correct entries must not carry an annotation")
        if self.annotation is not None and self.annotation.buggy_snippet not in self.gold_code:
            raise ValueError("buggy_snippet does not occur in the gold code")


def _parse_annotation(raw: Any, entry_id: str) -> ErrorAnnotation:
    if not isinstance(raw, dict):
        raise InvalidManifestError("must be an object", entry=entry_id, field="annotation")
    for key in ("description", "buggy_snippet", "fixed_snippet", "category"):
        if key not in raw:
            raise InvalidManifestError("missing", entry=entry_id, field=f"annotation.{key}")
    try:
        category = ErrorCategory(raw["category"])
    except ValueError:
        raise InvalidManifestError(
            f"unknown category {raw['category']!r}", entry=entry_id, field="annotation.category"
        ) from None
    try:
        return ErrorAnnotation(
            description=raw["description"],
            buggy_snippet=raw["buggy_snippet"],
            fixed_snippet=raw["fixed_snippet"],
            category=category,
        )
    except ValueError as exc:
        raise InvalidManifestError(str(exc), entry=entry_id, field="annotation") from exc


def load_manifest(path: Path) -> list[DatasetEntry]:
    """Parse and validate a manifest; gold files are read and canonicalized."""
    path = Path(path)
    base = path.parent
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidManifestError(f"not valid JSON: {exc}") from exc
    if not isinstance(raw, dict) or not isinstance(raw.get("entries"), list):
        raise InvalidManifestError("manifest must be an object with an 'entries' list")

    entries: list[DatasetEntry] = []
    seen: set[str] = set()
    for index, item in enumerate(raw["entries"]):
        if not isinstance(item, dict):
            raise InvalidManifestError("must be an object", entry=index)
        entry_id = item.get("program_id")
        if not isinstance(entry_id, str) or not entry_id:
            raise InvalidManifestError(
                "must be a non-empty string", entry=index, field="program_id"
            )
        if entry_id in seen:
            raise InvalidManifestError("duplicate program_id", entry=entry_id, field="program_id")
        seen.add(entry_id)

        for key in ("image", "gold", "split", "heldout"):
            if key not in item:
                raise InvalidManifestError("missing", entry=entry_id, field=key)
        try:
            split = Split(item["split"])
        except ValueError:
            raise InvalidManifestError(
                f"unknown split {item['split']!r}", entry=entry_id, field="split"
            ) from None
        if not isinstance(item["heldout"], bool):
            raise InvalidManifestError("must be a boolean", entry=entry_id, field="heldout")

        gold_path = base / item["gold"]
        if not gold_path.is_file():
            raise InvalidManifestError(f"file not found: {gold_path}", entry=entry_id, field="gold")
        gold_code = canonicalize(gold_path.read_text(encoding="utf-8"))
        if not gold_code:
            raise InvalidManifestError(
                "gold code is empty after canonicalization", entry=entry_id, field="gold"
            )
        image_path = base / item["image"]
        if not image_path.is_file():
            raise InvalidManifestError(
                f"file not found: {image_path}", entry=entry_id, field="image"
            )

        annotation = None
        if "annotation" in item and item["annotation"] is not None:
            annotation = _parse_annotation(item["annotation"], entry_id)

        try:
            entries.append(
                DatasetEntry(
                    program_id=entry_id,
                    image_path=image_path,
                    gold_code=gold_code,
                    split=split,
                    heldout=item["heldout"],
                    annotation=annotation,
                )
            )
        except ValueError as exc:
            raise InvalidManifestError(str(exc), entry=entry_id, field="annotation") from exc
    return entries


def filter_heldout(entries: list[DatasetEntry]) -> list[DatasetEntry]:
    """Entries excluded from classifier fitting; the evaluation subset."""
    return [entry for entry in entries if entry.heldout]
