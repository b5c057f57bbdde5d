"""Hallucination taxonomy: human label import and the automatic logical-fix
screen.

Only the LogicalFix category has an automatic detector; every other category
comes from human labeling. Imported human labels override the automatic
screen in reports.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Collection, Iterable

from ..metrics import canonicalize
from .manifest import ErrorAnnotation


class UnknownProgramError(ValueError):
    """A label references a program_id not present in the dataset."""


class DuplicateLabelError(ValueError):
    """Two labels share (program_id, labeler_id, run_id)."""


class HallucinationCategory(enum.Enum):
    NO_CHANGE = "no_change"
    COMMENT_CHANGE = "comment_change"
    MISSED_CONTENT = "missed_content"
    PRINT_CHANGE = "print_change"
    ADDED_CODE = "added_code"
    NAME_CHANGE = "name_change"
    INDENTATION_CHANGE = "indentation_change"
    SYNTAX_FIX = "syntax_fix"
    LOGICAL_FIX = "logical_fix"


@dataclass(frozen=True)
class HallucinationLabel:
    """One human judgment of how a correction run changed one program."""

    program_id: str
    category: HallucinationCategory
    labeler_id: str
    run_id: str
    blinded: bool


@dataclass(frozen=True)
class TaxonomyColumn:
    """Per-category percentages for one correction run."""

    run_id: str
    n: int
    percentages: tuple[tuple[str, float], ...]  # (category value, percent), all categories
    blinded_count: int

    def percent(self, category: HallucinationCategory) -> float:
        for name, value in self.percentages:
            if name == category.value:
                return value
        raise KeyError(category)


@dataclass(frozen=True)
class TaxonomyTable:
    columns: tuple[TaxonomyColumn, ...]
    labels: tuple[HallucinationLabel, ...]  # kept verbatim for audit


def import_labels(
    labels: Iterable[HallucinationLabel], known_program_ids: Collection[str]
) -> TaxonomyTable:
    """Validate labels and tabulate per-run category percentages.

    One column per run_id (sorted); within a run the denominator is the
    number of labels, one per (program, labeler).
    """
    known = set(known_program_ids)
    seen: set[tuple[str, str, str]] = set()
    accepted: list[HallucinationLabel] = []
    for label in labels:
        if label.program_id not in known:
            raise UnknownProgramError(f"label references unknown program {label.program_id!r}")
        key = (label.program_id, label.labeler_id, label.run_id)
        if key in seen:
            raise DuplicateLabelError(
                f"duplicate label for program {label.program_id!r}, "
                f"labeler {label.labeler_id!r}, run {label.run_id!r}"
            )
        seen.add(key)
        accepted.append(label)

    columns = []
    for run_id in sorted({label.run_id for label in accepted}):
        run_labels = [label for label in accepted if label.run_id == run_id]
        n = len(run_labels)
        percentages = tuple(
            (
                category.value,
                100.0 * sum(1 for label in run_labels if label.category is category) / n,
            )
            for category in HallucinationCategory
        )
        columns.append(
            TaxonomyColumn(
                run_id=run_id,
                n=n,
                percentages=percentages,
                blinded_count=sum(1 for label in run_labels if label.blinded),
            )
        )
    return TaxonomyTable(columns=tuple(columns), labels=tuple(accepted))


def _collapse_whitespace(text: str) -> str:
    return " ".join(text.split())


def detect_logical_fix(gold: str, annotation: ErrorAnnotation, predicted: str) -> bool:
    """Screen for a hallucinated repair of the annotated logical error.

    True when the prediction contains the fixed snippet (whitespace
    collapsed), or when the buggy snippet has vanished and the fixed
    snippet's non-whitespace characters appear in order (whitespace-free
    match). A faithful transcription of the bug returns False.
    """
    predicted_canon = canonicalize(predicted)
    predicted_collapsed = _collapse_whitespace(predicted_canon)
    fixed_collapsed = _collapse_whitespace(canonicalize(annotation.fixed_snippet))
    if fixed_collapsed and fixed_collapsed in predicted_collapsed:
        return True
    buggy_collapsed = _collapse_whitespace(canonicalize(annotation.buggy_snippet))
    if buggy_collapsed and buggy_collapsed in predicted_collapsed:
        return False
    compact = "".join(fixed_collapsed.split())
    if not compact:
        return False
    pattern = r"\s*".join(re.escape(char) for char in compact)
    return re.search(pattern, predicted_canon) is not None
