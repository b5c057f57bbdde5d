"""Dataset evaluation: run one configured pipeline over manifest entries,
score OCR Error against gold, and screen logical_error entries for
hallucinated fixes."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping

from ..metrics import OcrErrorScore, aggregate_ocr_error, normalized_levenshtein
from .hallucination import detect_logical_fix
from .manifest import DatasetEntry, Split, filter_heldout
from .pipeline import PipelineConfig, make_client, make_provider, run_pipeline


@dataclass(frozen=True)
class EntryFailure:
    program_id: str
    message: str


@dataclass(frozen=True)
class EntryResult:
    program_id: str
    ocr_error: float
    logical_fix: bool | None  # None for correct-split entries


@dataclass(frozen=True)
class EvaluationRow:
    """One report row: a config's scores over a dataset.

    ``logical_fix_percent`` is the share of successfully evaluated
    logical_error entries whose output repaired the annotated bug; None when
    the subset is empty. Failures are recorded, never silently dropped.
    """

    config_id: str
    label: str
    section: str
    score: OcrErrorScore | None
    per_entry: tuple[EntryResult, ...]
    failures: tuple[EntryFailure, ...]
    logical_error_count: int
    logical_fix_count: int

    @property
    def logical_fix_percent(self) -> float | None:
        if self.logical_error_count == 0:
            return None
        return 100.0 * self.logical_fix_count / self.logical_error_count


def _media_type(entry: DatasetEntry) -> str:
    suffix = entry.image_path.suffix.lower()
    return "image/jpeg" if suffix in (".jpg", ".jpeg") else "image/png"


def run_evaluation(
    config: PipelineConfig,
    entries: list[DatasetEntry],
    *,
    heldout_only: bool = False,
    max_workers: int | None = None,
    fix_overrides: Mapping[str, bool] | None = None,
) -> EvaluationRow:
    """Evaluate one config over the dataset.

    Entries run concurrently on a bounded pool; aggregation is a
    deterministic fold over results ordered by program_id, so reports are
    byte-identical across runs given fixtures and temperature-0 mocks.
    ``fix_overrides`` (program_id -> bool, typically from imported human
    labels) take precedence over the automatic logical-fix screen.
    """
    if not entries:
        raise ValueError("no entries to evaluate")
    selected = filter_heldout(entries) if heldout_only else list(entries)
    if not selected:
        raise ValueError("selection is empty (no heldout entries?)")

    provider = make_provider(config)
    client = make_client(config)
    workers = max_workers or min(8, os.cpu_count() or 1)

    def evaluate_entry(entry: DatasetEntry) -> EntryResult:
        image = entry.image_path.read_bytes()
        result = run_pipeline(
            image, config, provider=provider, client=client, media_type=_media_type(entry)
        )
        ocr_error = normalized_levenshtein(entry.gold_code, result.corrected_code)
        logical_fix: bool | None = None
        if entry.split is Split.LOGICAL_ERROR:
            assert entry.annotation is not None  # manifest invariant
            if fix_overrides is not None and entry.program_id in fix_overrides:
                logical_fix = fix_overrides[entry.program_id]
            else:
                logical_fix = detect_logical_fix(
                    entry.gold_code, entry.annotation, result.corrected_code
                )
        return EntryResult(
            program_id=entry.program_id, ocr_error=ocr_error, logical_fix=logical_fix
        )

    results: list[EntryResult] = []
    failures: list[EntryFailure] = []
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [(entry, pool.submit(evaluate_entry, entry)) for entry in selected]
        for entry, future in futures:
            try:
                results.append(future.result())
            except Exception as exc:
                failures.append(
                    EntryFailure(
                        program_id=entry.program_id,
                        message=f"{type(exc).__name__}: {exc}",
                    )
                )

    results.sort(key=lambda r: r.program_id)
    failures.sort(key=lambda f: f.program_id)
    score = (
        aggregate_ocr_error((r.program_id, r.ocr_error) for r in results) if results else None
    )
    logical = [r for r in results if r.logical_fix is not None]
    return EvaluationRow(
        config_id=config.config_id,
        label=config.label,
        section=config.section,
        score=score,
        per_entry=tuple(results),
        failures=tuple(failures),
        logical_error_count=len(logical),
        logical_fix_count=sum(1 for r in logical if r.logical_fix),
    )
