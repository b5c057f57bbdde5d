"""OCR Error metric: normalized Levenshtein distance plus dataset aggregation."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Iterable, Sequence


class EmptyGoldLabelError(ValueError):
    """Gold transcription is empty after canonicalization; L_norm undefined."""


class EmptyDatasetError(ValueError):
    """No per-program scores to aggregate."""


def canonicalize(text: str) -> str:
    """Normalize incidental whitespace before measuring distance.

    CRLF and bare CR become "\\n", each tab becomes four spaces, trailing
    whitespace is stripped per line, and trailing blank lines are dropped.
    Applied identically to gold and predicted text, so no algorithm is
    charged for line-ending or trailing-space noise.
    """
    unified = text.replace("\r\n", "\n").replace("\r", "\n").replace("\t", "    ")
    lines = [line.rstrip() for line in unified.split("\n")]
    while lines and lines[-1] == "":
        lines.pop()
    return "\n".join(lines)


def levenshtein(a: str, b: str) -> int:
    """Minimal number of single-character insertions, deletions, and
    substitutions converting ``a`` into ``b``.

    Two-row dynamic program over Unicode scalar values, O(len(a)*len(b))
    time, O(min) space.
    """
    if a == b:
        return 0
    # Keep the inner row the shorter string.
    if len(b) < len(a):
        a, b = b, a
    previous = list(range(len(a) + 1))
    for i, cb in enumerate(b, start=1):
        current = [i] + [0] * len(a)
        for j, ca in enumerate(a, start=1):
            cost = 0 if ca == cb else 1
            current[j] = min(
                previous[j] + 1,        # delete from b
                current[j - 1] + 1,     # insert into b
                previous[j - 1] + cost, # substitute
            )
        previous = current
    return previous[-1]


def normalized_levenshtein(gold: str, predicted: str) -> float:
    """Edit distance divided by gold length, as a percentage.

    Both strings are canonicalized first. Values above 100% are possible
    (predicted much longer than gold) and are not clipped.
    """
    gold_canon = canonicalize(gold)
    predicted_canon = canonicalize(predicted)
    if not gold_canon:
        raise EmptyGoldLabelError("gold transcription is empty after canonicalization")
    return levenshtein(gold_canon, predicted_canon) / len(gold_canon) * 100.0


@dataclass(frozen=True)
class OcrErrorScore:
    """Dataset-level OCR Error: per-program percentages plus mean and the
    standard error of the mean (sample standard deviation / sqrt(n)).

    ``std_error`` is None when n = 1; aggregation refuses n = 0.
    """

    per_program: tuple[tuple[str, float], ...]
    mean: float
    std_error: float | None
    n: int


def aggregate_ocr_error(scores: Iterable[tuple[str, float]]) -> OcrErrorScore:
    items = tuple((program_id, float(value)) for program_id, value in scores)
    if not items:
        raise EmptyDatasetError("no scores to aggregate")
    values: Sequence[float] = [value for _, value in items]
    mean = statistics.mean(values)
    if len(values) == 1:
        std_error = None
    else:
        std_error = statistics.stdev(values) / math.sqrt(len(values))
    return OcrErrorScore(per_program=items, mean=mean, std_error=std_error, n=len(items))
