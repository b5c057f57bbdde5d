"""Report emission: machine-readable JSON plus an aligned text table grouped
by section, mirroring the structure of the benchmark tables."""

from __future__ import annotations

import json
from pathlib import Path

from ..metrics import OcrErrorScore
from .evaluate import EntryFailure, EntryResult, EvaluationRow

ABSENT = "n/a"


def report_to_json(rows: list[EvaluationRow]) -> str:
    """Deterministic machine-readable report: fixed key order, two-space
    indent, trailing newline. Byte-identical across runs on equal inputs."""
    if not rows:
        raise ValueError("report needs at least one row")
    payload = {
        "rows": [
            {
                "config_id": row.config_id,
                "label": row.label,
                "section": row.section,
                "n": row.score.n if row.score else 0,
                "mean_ocr_error": row.score.mean if row.score else None,
                "std_error": row.score.std_error if row.score else None,
                "logical_error_count": row.logical_error_count,
                "logical_fix_count": row.logical_fix_count,
                "logical_fix_percent": row.logical_fix_percent,
                "failures": [
                    {"program_id": f.program_id, "message": f.message} for f in row.failures
                ],
                "per_program": [
                    {
                        "program_id": r.program_id,
                        "ocr_error": r.ocr_error,
                        "logical_fix": r.logical_fix,
                    }
                    for r in row.per_entry
                ],
            }
            for row in rows
        ]
    }
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def report_from_json(text: str) -> list[EvaluationRow]:
    """Inverse of report_to_json; round-trips to equal values."""
    payload = json.loads(text)
    rows = []
    for raw in payload["rows"]:
        per_entry = tuple(
            EntryResult(
                program_id=r["program_id"],
                ocr_error=r["ocr_error"],
                logical_fix=r["logical_fix"],
            )
            for r in raw["per_program"]
        )
        score = None
        if raw["mean_ocr_error"] is not None:
            score = OcrErrorScore(
                per_program=tuple((r.program_id, r.ocr_error) for r in per_entry),
                mean=raw["mean_ocr_error"],
                std_error=raw["std_error"],
                n=raw["n"],
            )
        rows.append(
            EvaluationRow(
                config_id=raw["config_id"],
                label=raw["label"],
                section=raw["section"],
                score=score,
                per_entry=per_entry,
                failures=tuple(
                    EntryFailure(program_id=f["program_id"], message=f["message"])
                    for f in raw["failures"]
                ),
                logical_error_count=raw["logical_error_count"],
                logical_fix_count=raw["logical_fix_count"],
            )
        )
    return rows


def _format_score(row: EvaluationRow) -> tuple[str, str]:
    if row.score is None:
        return ABSENT, ABSENT
    mean = f"{row.score.mean:.3f} %"
    std = f"+/- {row.score.std_error:.3f} %" if row.score.std_error is not None else ABSENT
    return mean, std


def render_table(rows: list[EvaluationRow]) -> str:
    """Human-readable table, one block per section in first-appearance order."""
    if not rows:
        raise ValueError("report needs at least one row")
    sections: list[str] = []
    for row in rows:
        if row.section not in sections:
            sections.append(row.section)

    header = ("config", "label", "n", "OCR error", "std err", "logical fix")
    table_rows: dict[str, list[tuple[str, ...]]] = {section: [] for section in sections}
    for row in rows:
        mean, std = _format_score(row)
        fix = (
            f"{row.logical_fix_percent:.1f} % of {row.logical_error_count}"
            if row.logical_fix_percent is not None
            else ABSENT
        )
        n = str(row.score.n if row.score else 0)
        if row.failures:
            n += f" ({len(row.failures)} failed)"
        table_rows[row.section].append((row.config_id, row.label, n, mean, std, fix))

    all_cells = [header] + [cells for section in sections for cells in table_rows[section]]
    widths = [max(len(r[i]) for r in all_cells) for i in range(len(header))]

    def format_line(cells: tuple[str, ...]) -> str:
        return "  ".join(cell.ljust(width) for cell, width in zip(cells, widths)).rstrip()

    lines: list[str] = []
    for section in sections:
        title = section if section else "(unsectioned)"
        lines.append(f"== {title} ==")
        lines.append(format_line(header))
        for cells in table_rows[section]:
            lines.append(format_line(cells))
        lines.append("")
    return "\n".join(lines).rstrip("\n") + "\n"


def emit_report(
    rows: list[EvaluationRow], json_path: Path, text_path: Path | None = None
) -> tuple[str, str]:
    """Write the JSON report (and text table next to it); returns both."""
    json_text = report_to_json(rows)
    table_text = render_table(rows)
    json_path = Path(json_path)
    json_path.parent.mkdir(parents=True, exist_ok=True)
    json_path.write_text(json_text, encoding="utf-8")
    if text_path is None:
        text_path = json_path.with_suffix(".txt")
    text_path = Path(text_path)
    text_path.write_text(table_text, encoding="utf-8")
    return json_text, table_text
