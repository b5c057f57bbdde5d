"""Relative indentation: classify successive x-position deltas, then rebuild
levels line by line.

Each positive width-normalized delta is scored by a two-Gaussian
indent/no-indent classifier; negative deltas fall back to the nearest
ancestor: the prior line whose recorded x-position is horizontally closest.
"""

from __future__ import annotations

import enum
import json
import math
import statistics
from dataclasses import dataclass
from typing import Any, Iterable

from .codemodel import IndentedLine, IndentedProgram, OcrDocument

# A positive delta counts as an indent when the posterior clears this.
INDENT_DECISION_THRESHOLD = 0.5

SIGMA_FLOOR = 1e-6


class InsufficientLabelsError(ValueError):
    """A class has fewer than two labeled samples; std is undefined."""


class InvertedClassesError(ValueError):
    """Fitted indent mean does not exceed the no-indent mean."""


class IndentLabel(enum.Enum):
    NO_INDENT = "no_indent"
    INDENT = "indent"


@dataclass(frozen=True)
class GmmParams:
    """Two-component Gaussian classifier over positive deltas.

    Units are width-normalized (dimensionless). tau is the prior weight of
    the indent component; both components are assumed equally likely by
    default, so tau stays at 0.5 and is never fitted.
    """

    mu_no_indent: float
    sigma_no_indent: float
    mu_indent: float
    sigma_indent: float
    tau: float = 0.5

    def __post_init__(self) -> None:
        if self.sigma_no_indent <= 0 or self.sigma_indent <= 0:
            raise ValueError("sigmas must be positive")
        if not 0 < self.tau < 1:
            raise ValueError(f"tau must lie in (0, 1), got {self.tau!r}")
        if self.mu_indent <= self.mu_no_indent:
            raise ValueError("mu_indent must exceed mu_no_indent")

    def to_json_dict(self) -> dict[str, float]:
        return {
            "mu_no_indent": self.mu_no_indent,
            "sigma_no_indent": self.sigma_no_indent,
            "mu_indent": self.mu_indent,
            "sigma_indent": self.sigma_indent,
            "tau": self.tau,
        }

    @classmethod
    def from_json_dict(cls, data: dict[str, Any]) -> "GmmParams":
        try:
            return cls(
                mu_no_indent=float(data["mu_no_indent"]),
                sigma_no_indent=float(data["sigma_no_indent"]),
                mu_indent=float(data["mu_indent"]),
                sigma_indent=float(data["sigma_indent"]),
                tau=float(data["tau"]),
            )
        except KeyError as exc:
            raise ValueError(f"classifier params missing field {exc.args[0]!r}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "GmmParams":
        return cls.from_json_dict(json.loads(text))


# Defaults fitted offline on a hand-labeled training set of 16 classroom
# photos; deltas are width-normalized.
DEFAULT_GMM_PARAMS = GmmParams(
    mu_no_indent=0.007,
    sigma_no_indent=0.008,
    mu_indent=0.078,
    sigma_indent=0.025,
    tau=0.5,
)


def compute_deltas(doc: OcrDocument) -> list[float]:
    """Width-normalized successive differences of line x_min.

    A document with n lines yields n-1 deltas; a single line yields none.
    Assumes the document is already in reading order.
    """
    x_mins = [line.box.x_min for line in doc.lines]
    width = doc.image_width
    return [(b - a) / width for a, b in zip(x_mins, x_mins[1:])]


def _normal_pdf(x: float, mu: float, sigma: float) -> float:
    z = (x - mu) / sigma
    return math.exp(-0.5 * z * z) / (sigma * math.sqrt(2.0 * math.pi))


def classify_delta(delta: float, params: GmmParams) -> float:
    """Posterior probability that a non-negative delta is an indent.

    Bayes over the two components: tau * f_indent / (tau * f_indent +
    (1 - tau) * f_no_indent). With tau = 0.5 the priors cancel.
    """
    if delta < 0:
        raise ValueError(f"classify_delta is defined for deltas >= 0, got {delta!r}")
    f_indent = _normal_pdf(delta, params.mu_indent, params.sigma_indent)
    f_no_indent = _normal_pdf(delta, params.mu_no_indent, params.sigma_no_indent)
    weighted_indent = params.tau * f_indent
    weighted_no_indent = (1.0 - params.tau) * f_no_indent
    return weighted_indent / (weighted_indent + weighted_no_indent)


def fit_gmm_mle(labeled: Iterable[tuple[float, IndentLabel]]) -> GmmParams:
    """Maximum-likelihood fit: per-class mean and population (divide-by-N)
    standard deviation, sigma floored at 1e-6, tau fixed at 0.5.

    Needs at least two samples per class; the fitted indent mean must exceed
    the no-indent mean or the labels are considered inverted.
    """
    by_label: dict[IndentLabel, list[float]] = {label: [] for label in IndentLabel}
    for delta, label in labeled:
        by_label[IndentLabel(label)].append(float(delta))
    for label in IndentLabel:
        if len(by_label[label]) < 2:
            raise InsufficientLabelsError(
                f"need at least 2 samples labeled {label.value}, got {len(by_label[label])}"
            )
    mu_no = statistics.mean(by_label[IndentLabel.NO_INDENT])
    mu_in = statistics.mean(by_label[IndentLabel.INDENT])
    sigma_no = max(statistics.pstdev(by_label[IndentLabel.NO_INDENT]), SIGMA_FLOOR)
    sigma_in = max(statistics.pstdev(by_label[IndentLabel.INDENT]), SIGMA_FLOOR)
    if mu_in <= mu_no:
        raise InvertedClassesError(
            f"indent mean {mu_in} does not exceed no-indent mean {mu_no}"
        )
    return GmmParams(
        mu_no_indent=mu_no,
        sigma_no_indent=sigma_no,
        mu_indent=mu_in,
        sigma_indent=sigma_in,
        tau=0.5,
    )


def _nearest_ancestor_level(levels: list[int], x_mins: list[float], i: int) -> int:
    """Level for a dedented line i: trace upward recording the first line seen
    per level, pick the level whose recorded x_min is closest to line i's,
    ties toward the smaller (outer) level.

    Only levels at or above the previous line's scope qualify. Deeper lines
    belong to blocks that line i-1 already closed; matching one of those
    could push a dedented line deeper than its predecessor. For a qualifying
    level the first line seen walking up is necessarily the enclosing
    occurrence of that level, so this walk reconstructs the open scope chain.
    """
    ceiling = levels[i - 1]
    recorded: dict[int, float] = {}
    for j in range(i - 1, -1, -1):
        level = levels[j]
        if level <= ceiling and level not in recorded:
            recorded[level] = x_mins[j]
    current = x_mins[i]
    return min(recorded, key=lambda level: (abs(recorded[level] - current), level))


def relative_indent(doc: OcrDocument, params: GmmParams = DEFAULT_GMM_PARAMS) -> IndentedProgram:
    """Rebuild indent levels from successive deltas.

    Line 1 sits at level 0. For each following line: a positive delta
    classified as Indent increments the level by one (never more); a positive
    delta classified as NoIndent, or a delta of exactly zero, keeps the
    level; a negative delta takes the nearest ancestor's level. Assumes the
    document is already in reading order.
    """
    if not doc.lines:
        return IndentedProgram(lines=())
    x_mins = [line.box.x_min for line in doc.lines]
    deltas = compute_deltas(doc)
    levels: list[int] = [0]
    for i, delta in enumerate(deltas, start=1):
        if delta > 0:
            if classify_delta(delta, params) > INDENT_DECISION_THRESHOLD:
                levels.append(levels[-1] + 1)
            else:
                levels.append(levels[-1])
        elif delta == 0:
            # Identical alignment; the classifier is not consulted.
            levels.append(levels[-1])
        else:
            levels.append(_nearest_ancestor_level(levels, x_mins, i))
    return IndentedProgram(
        lines=tuple(
            IndentedLine(text=line.text, level=levels[i]) for i, line in enumerate(doc.lines)
        )
    )
