"""Absolute indentation: cluster line start x-coordinates with 1-D mean shift.

Bandwidth adapts to handwriting size as 1.5x the mean bounding-box height.
Indent level of a line is the rank of its cluster center, leftmost = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .codemodel import IndentedLine, IndentedProgram, OcrDocument

BANDWIDTH_FACTOR = 1.5
CONVERGENCE_TOL_FACTOR = 1e-3   # tolerance = factor * bandwidth
MAX_ITERATIONS = 300


class EmptyDocumentError(ValueError):
    """Document has no lines; bandwidth and clustering are undefined."""


class DegenerateBandwidthError(ValueError):
    """Estimated bandwidth is zero (all boxes have zero height)."""


class InvalidBandwidthError(ValueError):
    """Bandwidth must be a positive finite number."""


@dataclass(frozen=True)
class ClusterModel:
    """Mean-shift result: sorted centers plus per-point cluster indices."""

    centers: tuple[float, ...]
    assignment: tuple[int, ...]

    def __post_init__(self) -> None:
        for left, right in zip(self.centers, self.centers[1:]):
            if not left < right:
                raise ValueError("centers must be strictly increasing")
        for index in self.assignment:
            if not 0 <= index < len(self.centers):
                raise ValueError(f"assignment index {index} out of range")


def estimate_bandwidth(doc: OcrDocument) -> float:
    """Adaptive bandwidth: 1.5 x mean bounding-box height."""
    if not doc.lines:
        raise EmptyDocumentError("cannot estimate bandwidth of an empty document")
    heights = [line.box.height for line in doc.lines]
    bandwidth = BANDWIDTH_FACTOR * (sum(heights) / len(heights))
    if bandwidth <= 0:
        raise DegenerateBandwidthError("all bounding boxes have zero height")
    return bandwidth


def mean_shift_1d(points: Sequence[float], bandwidth: float) -> ClusterModel:
    """Flat-kernel mean shift over 1-D points.

    One mode is seeded per point and moved to the mean of points within
    ``bandwidth`` of it, until the move is at most 1e-3 x bandwidth or 300
    iterations pass. Converged modes closer than bandwidth/2 merge (keeping
    the mean of the merged modes); each point is then assigned to its nearest
    surviving center, ties toward the smaller center. Iteration is in input
    order so results are reproducible bit for bit.
    """
    if not (math.isfinite(bandwidth) and bandwidth > 0):
        raise InvalidBandwidthError(f"bandwidth must be positive and finite, got {bandwidth!r}")
    if not points:
        return ClusterModel(centers=(), assignment=())
    tolerance = CONVERGENCE_TOL_FACTOR * bandwidth

    modes: list[float] = []
    for seed in points:
        m = float(seed)
        for _ in range(MAX_ITERATIONS):
            window = [p for p in points if abs(p - m) <= bandwidth]
            shifted = sum(window) / len(window)
            moved = abs(shifted - m)
            m = shifted
            if moved <= tolerance:
                break
        modes.append(m)

    # Merge nearby modes; repeat passes until no pair of group means is
    # within the merge radius.
    merge_radius = bandwidth / 2
    groups: list[list[float]] = [[m] for m in modes]
    changed = True
    while changed:
        changed = False
        merged: list[list[float]] = []
        for group in groups:
            center = sum(group) / len(group)
            for existing in merged:
                existing_center = sum(existing) / len(existing)
                if abs(center - existing_center) < merge_radius:
                    existing.extend(group)
                    changed = True
                    break
            else:
                merged.append(group)
        groups = merged

    centers = sorted(sum(group) / len(group) for group in groups)
    assignment = []
    for p in points:
        best = min(range(len(centers)), key=lambda k: (abs(p - centers[k]), k))
        assignment.append(best)
    return ClusterModel(centers=tuple(centers), assignment=tuple(assignment))


def absolute_indent(doc: OcrDocument) -> IndentedProgram:
    """Cluster every line's x_min; indent level = rank of its cluster center."""
    bandwidth = estimate_bandwidth(doc)
    x_mins = [line.box.x_min for line in doc.lines]
    model = mean_shift_1d(x_mins, bandwidth)
    return IndentedProgram(
        lines=tuple(
            IndentedLine(text=line.text, level=model.assignment[i])
            for i, line in enumerate(doc.lines)
        )
    )
