"""Command-line interface for the evaluation harness.

    inkcode-eval run --manifest M --config C [--config C2 ...] --out R.json
    inkcode-eval cost --model-file F --code-chars N --instruction-chars N --output-chars N
    inkcode-eval labels import --file L --manifest M [--out T.json]
    inkcode-eval fixtures record --provider P.json --manifest M --out-dir D

``run`` exits 0 on full success and 2 when any entry failed (the partial
report is still written).
"""

from __future__ import annotations

import hashlib
import json
import sys
from pathlib import Path

import click

from ..ocr_adapters import ProviderConfig, RemoteProvider, record_fixture
from .evaluate import run_evaluation
from .hallucination import HallucinationCategory, HallucinationLabel, import_labels
from .cost import CostModel, estimate_cost
from .manifest import load_manifest
from .pipeline import load_pipeline_config
from .report import emit_report


@click.group()
def main() -> None:
    """Evaluation harness for the handwriting digitization pipeline."""


def _load_label_file(path: Path) -> list[HallucinationLabel]:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, list):
        raise click.ClickException(f"{path}: labels file must be a JSON list")
    labels = []
    for i, item in enumerate(raw):
        try:
            labels.append(
                HallucinationLabel(
                    program_id=item["program_id"],
                    category=HallucinationCategory(item["category"]),
                    labeler_id=item["labeler_id"],
                    run_id=item["run_id"],
                    blinded=bool(item.get("blinded", False)),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise click.ClickException(f"{path}: label {i}: {exc}") from exc
    return labels


@main.command("run")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--config", "config_paths", required=True, multiple=True, type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
@click.option("--heldout-only", is_flag=True, help="Evaluate only heldout entries.")
@click.option("--workers", type=int, default=None, help="Worker pool size.")
@click.option("--labels", "labels_path", type=click.Path(exists=True, path_type=Path), default=None,
              help="Human hallucination labels; LogicalFix labels override the automatic screen.")
def run_command(
    manifest_path: Path,
    config_paths: tuple[Path, ...],
    out_path: Path,
    heldout_only: bool,
    workers: int | None,
    labels_path: Path | None,
) -> None:
    """Evaluate one or more pipeline configs over a dataset manifest."""
    entries = load_manifest(manifest_path)
    fix_overrides = None
    if labels_path is not None:
        labels = _load_label_file(labels_path)
        import_labels(labels, {entry.program_id for entry in entries})  # validates
        fix_overrides = {}
        for label in labels:
            flagged = label.category is HallucinationCategory.LOGICAL_FIX
            fix_overrides[label.program_id] = fix_overrides.get(label.program_id, False) or flagged

    rows = []
    for config_path in config_paths:
        config = load_pipeline_config(config_path)
        rows.append(
            run_evaluation(
                config,
                entries,
                heldout_only=heldout_only,
                max_workers=workers,
                fix_overrides=fix_overrides,
            )
        )
    _, table = emit_report(rows, out_path)
    click.echo(table, nl=False)
    failed = sum(len(row.failures) for row in rows)
    if failed:
        click.echo(f"{failed} entry evaluation(s) failed; see report for details", err=True)
        sys.exit(2)


@main.command("cost")
@click.option("--model-file", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--code-chars", type=float, required=True)
@click.option("--instruction-chars", type=float, required=True)
@click.option("--output-chars", type=float, required=True)
@click.option("--multimodal", is_flag=True)
def cost_command(
    model_file: Path,
    code_chars: float,
    instruction_chars: float,
    output_chars: float,
    multimodal: bool,
) -> None:
    """Estimate the per-image cost of a pipeline."""
    model = CostModel.from_json_file(model_file)
    breakdown = estimate_cost(model, code_chars, instruction_chars, output_chars, multimodal)
    click.echo(f"fixed   $ {breakdown.fixed_cost:.5f}")
    click.echo(f"input   $ {breakdown.input_cost:.5f}")
    click.echo(f"output  $ {breakdown.output_cost:.5f}")
    click.echo(f"llm     $ {breakdown.llm_cost:.5f}")
    click.echo(f"total   $ {breakdown.total:.5f}")


@main.group("labels")
def labels_group() -> None:
    """Hallucination label management."""


@labels_group.command("import")
@click.option("--file", "labels_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None)
def labels_import_command(labels_path: Path, manifest_path: Path, out_path: Path | None) -> None:
    """Validate labels against a manifest and tabulate category percentages."""
    entries = load_manifest(manifest_path)
    labels = _load_label_file(labels_path)
    try:
        table = import_labels(labels, {entry.program_id for entry in entries})
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    payload = {
        "columns": [
            {
                "run_id": column.run_id,
                "n": column.n,
                "blinded_count": column.blinded_count,
                "percentages": dict(column.percentages),
            }
            for column in table.columns
        ]
    }
    text = json.dumps(payload, indent=2) + "\n"
    if out_path is not None:
        Path(out_path).write_text(text, encoding="utf-8")
    click.echo(text, nl=False)


@main.group("fixtures")
def fixtures_group() -> None:
    """Recorded OCR fixture management."""


@fixtures_group.command("record")
@click.option("--provider", "provider_path", required=True, type=click.Path(exists=True, path_type=Path),
              help="JSON file with the remote provider settings (the config schema's ocr.remote object).")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--out-dir", "out_dir", required=True, type=click.Path(path_type=Path))
def fixtures_record_command(provider_path: Path, manifest_path: Path, out_dir: Path) -> None:
    """Run a remote provider over every manifest image and record fixtures
    keyed by image hash, for later replay."""
    raw = json.loads(Path(provider_path).read_text(encoding="utf-8"))
    try:
        provider_config = ProviderConfig(
            provider_id=raw["provider_id"],
            endpoint=raw["endpoint"],
            credential_env=raw["credential_env"],
            timeout_seconds=float(raw.get("timeout_seconds", 30.0)),
            retry_limit=int(raw.get("retry_limit", 2)),
            response_schema=raw.get("response_schema", "generic"),
            concurrency=int(raw.get("concurrency", 4)),
        )
    except (KeyError, ValueError) as exc:
        raise click.ClickException(f"{provider_path}: {exc}") from exc
    provider = RemoteProvider(provider_config)
    entries = load_manifest(manifest_path)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for entry in entries:
        image = entry.image_path.read_bytes()
        suffix = entry.image_path.suffix.lower()
        media_type = "image/jpeg" if suffix in (".jpg", ".jpeg") else "image/png"
        doc = provider.recognize(image, media_type)
        digest = hashlib.sha256(image).hexdigest()
        record_fixture(doc, out_dir / f"{digest}.json")
        click.echo(f"{entry.program_id}: recorded {digest}.json")


if __name__ == "__main__":
    main()
