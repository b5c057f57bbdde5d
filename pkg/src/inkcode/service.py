"""HTTP facade over the pipeline for the classroom review loop.

Submit a photo, poll the job while it moves through ocr -> indent -> correct,
review the transcription (line boxes and indent levels included for overlay
rendering), edit it, re-run correction with a different strategy, export the
final code. Jobs persist on local disk keyed by job_id; the in-memory index
is rebuilt on startup by scanning the data directory. No endpoint executes
student code.
"""

from __future__ import annotations

import argparse
import enum
import json
import logging
import os
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from fastapi import FastAPI, File, Form, UploadFile
from fastapi.responses import JSONResponse, PlainTextResponse

from .codemodel import (
    IndentedProgram,
    PipelineResult,
    StageTiming,
    normalize_reading_order,
    render_program,
)
from .evalharness.pipeline import (
    PipelineConfig,
    apply_indent,
    load_pipeline_config,
    make_client,
    make_provider,
)
from .postcorrect import CorrectionKind, CorrectionStrategy, run_correction

logger = logging.getLogger(__name__)

ALLOWED_MEDIA_TYPES = {"image/jpeg": ".jpg", "image/png": ".png"}
DEFAULT_MAX_UPLOAD_BYTES = 10 * 1024 * 1024

# Strategies recorrect accepts: they re-run over the stored indented program.
# The multimodal path is not recorrectable (it starts from the image, outside
# the stored pipeline state).
RECORRECT_STRATEGIES = ("none", "simple", "chain_of_thought")


class JobState(enum.Enum):
    QUEUED = "queued"
    OCR = "ocr"
    INDENT = "indent"
    CORRECT = "correct"
    DONE = "done"
    FAILED = "failed"


@dataclass(frozen=True)
class ServiceSettings:
    data_dir: Path
    configs_dir: Path
    max_upload_bytes: int = DEFAULT_MAX_UPLOAD_BYTES
    workers: int = 2
    default_config_id: str | None = None  # falls back to first config id, sorted

    @classmethod
    def from_env(cls) -> "ServiceSettings":
        data_dir = os.environ.get("INKCODE_DATA_DIR")
        configs_dir = os.environ.get("INKCODE_CONFIGS_DIR")
        if not data_dir or not configs_dir:
            raise RuntimeError(
                "INKCODE_DATA_DIR and INKCODE_CONFIGS_DIR must be set"
            )
        return cls(
            data_dir=Path(data_dir),
            configs_dir=Path(configs_dir),
            max_upload_bytes=int(
                os.environ.get("INKCODE_MAX_UPLOAD_BYTES", DEFAULT_MAX_UPLOAD_BYTES)
            ),
            workers=int(os.environ.get("INKCODE_WORKERS", 2)),
            default_config_id=os.environ.get("INKCODE_DEFAULT_CONFIG") or None,
        )


class JobStore:
    """Disk-backed job records with per-job single-writer locking.

    Layout: <data_dir>/jobs/<job_id>/job.json plus the uploaded image.
    Writes go through a temp file and atomic rename.
    """

    def __init__(self, data_dir: Path):
        self.jobs_dir = Path(data_dir) / "jobs"
        self.jobs_dir.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        self._known: set[str] = set()
        self.scan()

    def scan(self) -> None:
        """Rebuild the in-memory index from the data directory."""
        with self._locks_guard:
            self._known = {
                path.parent.name for path in self.jobs_dir.glob("*/job.json")
            }

    def _lock(self, job_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(job_id, threading.Lock())

    def _job_path(self, job_id: str) -> Path:
        return self.jobs_dir / job_id / "job.json"

    def exists(self, job_id: str) -> bool:
        with self._locks_guard:
            if job_id in self._known:
                return True
        return self._job_path(job_id).is_file()

    def create(self, record: dict[str, Any], image: bytes, image_suffix: str) -> None:
        job_id = record["job_id"]
        job_dir = self.jobs_dir / job_id
        job_dir.mkdir(parents=True, exist_ok=True)
        (job_dir / f"image{image_suffix}").write_bytes(image)
        with self._lock(job_id):
            self._write(job_id, record)
        with self._locks_guard:
            self._known.add(job_id)

    def read(self, job_id: str) -> dict[str, Any]:
        with self._lock(job_id):
            return json.loads(self._job_path(job_id).read_text(encoding="utf-8"))

    def image_path(self, job_id: str) -> Path:
        job_dir = self.jobs_dir / job_id
        for candidate in job_dir.glob("image.*"):
            return candidate
        raise FileNotFoundError(f"no image stored for job {job_id}")

    def mutate(self, job_id: str, update) -> dict[str, Any]:
        """Apply ``update(record) -> record`` under the job's writer lock."""
        with self._lock(job_id):
            record = json.loads(self._job_path(job_id).read_text(encoding="utf-8"))
            record = update(record)
            record["updated_at"] = time.time()
            self._write(job_id, record)
            return record

    def _write(self, job_id: str, record: dict[str, Any]) -> None:
        path = self._job_path(job_id)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(record, indent=2) + "\n", encoding="utf-8")
        os.replace(tmp, path)


def _load_configs(configs_dir: Path) -> dict[str, PipelineConfig]:
    configs = {}
    for path in sorted(Path(configs_dir).glob("*.json")):
        config = load_pipeline_config(path)
        configs[config.config_id] = config
    if not configs:
        raise RuntimeError(f"no pipeline configs found in {configs_dir}")
    return configs


def create_app(settings: ServiceSettings | None = None) -> FastAPI:
    settings = settings or ServiceSettings.from_env()
    store = JobStore(settings.data_dir)
    configs = _load_configs(settings.configs_dir)
    default_config_id = settings.default_config_id or sorted(configs)[0]
    if default_config_id not in configs:
        raise RuntimeError(f"default config {default_config_id!r} not found")
    executor = ThreadPoolExecutor(max_workers=settings.workers)

    # One provider/client pair per config, shared across jobs.
    stages_cache: dict[str, tuple[Any, Any]] = {}
    stages_guard = threading.Lock()

    def stages_for(config_id: str):
        with stages_guard:
            if config_id not in stages_cache:
                config = configs[config_id]
                stages_cache[config_id] = (make_provider(config), make_client(config))
            return stages_cache[config_id]

    app = FastAPI(title="inkcode review service", version="1")

    def reject(status: int, reason: str, detail: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"reason": reason, "detail": detail})

    def set_state(job_id: str, state: JobState) -> None:
        def update(record):
            record["state"] = state.value
            return record

        store.mutate(job_id, update)

    def run_job(job_id: str, config_id: str, media_type: str) -> None:
        config = configs[config_id]
        provider, client = stages_for(config_id)
        try:
            image = store.image_path(job_id).read_bytes()
            timings: list[StageTiming] = []

            set_state(job_id, JobState.OCR)
            start = time.perf_counter()
            doc = normalize_reading_order(provider.recognize(image, media_type))
            timings.append(StageTiming("ocr", time.perf_counter() - start))

            set_state(job_id, JobState.INDENT)
            start = time.perf_counter()
            program = apply_indent(doc, config)
            rendered = render_program(program)
            timings.append(StageTiming("indent", time.perf_counter() - start))

            set_state(job_id, JobState.CORRECT)
            start = time.perf_counter()
            corrected = run_correction(
                config.strategy, client, code=rendered, image=image, media_type=media_type
            )
            timings.append(StageTiming("correct", time.perf_counter() - start))

            result = PipelineResult(
                raw_ocr=doc,
                indented=program,
                corrected_code=corrected,
                config_id=config.config_id,
                stage_timings=tuple(timings),
            )

            def finish(record):
                record["state"] = JobState.DONE.value
                record["result"] = result.to_json_dict()
                record["error"] = None
                return record

            store.mutate(job_id, finish)
        except Exception as exc:
            detail = f"{type(exc).__name__}: {exc}"
            logger.exception("job %s failed", job_id)

            def fail(record):
                record["state"] = JobState.FAILED.value
                record["error"] = detail
                return record

            store.mutate(job_id, fail)

    @app.post("/api/v1/jobs", status_code=202)
    def submit(image: UploadFile = File(...), config_id: str = Form(default="")):
        media_type = image.content_type or ""
        if media_type not in ALLOWED_MEDIA_TYPES:
            return reject(415, "UnsupportedMediaType", f"got {media_type!r}, want jpeg or png")
        data = image.file.read(settings.max_upload_bytes + 1)
        if len(data) > settings.max_upload_bytes:
            return reject(413, "TooLarge", f"upload exceeds {settings.max_upload_bytes} bytes")
        if not data:
            return reject(422, "EmptyUpload", "image file is empty")
        chosen = config_id or default_config_id
        if chosen not in configs:
            return reject(422, "UnknownConfig", f"no config {chosen!r}")
        job_id = uuid.uuid4().hex
        now = time.time()
        store.create(
            {
                "job_id": job_id,
                "state": JobState.QUEUED.value,
                "config_id": chosen,
                "media_type": media_type,
                "created_at": now,
                "updated_at": now,
                "error": None,
                "result": None,
                "edited_code": None,
                "audit": [],
                "last_recorrect_error": None,
            },
            data,
            ALLOWED_MEDIA_TYPES[media_type],
        )
        executor.submit(run_job, job_id, chosen, media_type)
        return {"job_id": job_id}

    @app.get("/api/v1/jobs/{job_id}")
    def get_job(job_id: str):
        if not store.exists(job_id):
            return reject(404, "UnknownJob", f"no job {job_id!r}")
        return store.read(job_id)

    @app.put("/api/v1/jobs/{job_id}/edit")
    def save_edit(job_id: str, body: dict):
        if not store.exists(job_id):
            return reject(404, "UnknownJob", f"no job {job_id!r}")
        if "code" not in body or not isinstance(body["code"], str):
            return reject(422, "BadEdit", "body must be {\"code\": string}")
        record = store.read(job_id)
        if record["state"] != JobState.DONE.value:
            return reject(409, "NotDone", f"job is {record['state']}, edits need done")

        def update(rec):
            rec["edited_code"] = body["code"]
            return rec

        return store.mutate(job_id, update)

    @app.post("/api/v1/jobs/{job_id}/recorrect")
    def recorrect(job_id: str, body: dict):
        if not store.exists(job_id):
            return reject(404, "UnknownJob", f"no job {job_id!r}")
        strategy_name = body.get("strategy")
        if strategy_name not in RECORRECT_STRATEGIES:
            return reject(
                422,
                "UnknownStrategy",
                f"strategy must be one of {', '.join(RECORRECT_STRATEGIES)}",
            )
        record = store.read(job_id)
        if record["state"] != JobState.DONE.value:
            return reject(409, "NotDone", f"job is {record['state']}, recorrect needs done")
        config = configs[record["config_id"]]
        _, client = stages_for(record["config_id"])
        program = IndentedProgram.from_json_dict(record["result"]["indented"])
        rendered = render_program(program)
        strategy = CorrectionStrategy(
            kind=CorrectionKind(strategy_name),
            model_id=config.strategy.model_id,
            temperature=config.strategy.temperature,
        )
        try:
            corrected = run_correction(strategy, client, code=rendered)
        except Exception as exc:
            detail = f"{type(exc).__name__}: {exc}"

            def record_error(rec):
                rec["last_recorrect_error"] = detail
                return rec

            return store.mutate(job_id, record_error)

        def update(rec):
            rec["audit"].append(rec["result"]["corrected_code"])
            rec["result"]["corrected_code"] = corrected
            rec["last_recorrect_error"] = None
            return rec

        return store.mutate(job_id, update)

    @app.get("/api/v1/jobs/{job_id}/export")
    def export(job_id: str):
        if not store.exists(job_id):
            return reject(404, "UnknownJob", f"no job {job_id!r}")
        record = store.read(job_id)
        if record["state"] != JobState.DONE.value:
            return reject(409, "NotDone", f"job is {record['state']}, export needs done")
        code = record["edited_code"]
        if code is None:
            code = record["result"]["corrected_code"]
        return PlainTextResponse(code)

    @app.get("/api/v1/configs")
    def list_configs():
        return [
            {
                "config_id": config.config_id,
                "label": config.label,
                "section": config.section,
                "indent_mode": config.indent_mode.value,
                "strategy": config.strategy.kind.value,
                "default": config.config_id == default_config_id,
            }
            for config in sorted(configs.values(), key=lambda c: c.config_id)
        ]

    return app


def main() -> None:
    parser = argparse.ArgumentParser(description="Run the review service.")
    parser.add_argument("--host", default=os.environ.get("INKCODE_HOST", "127.0.0.1"))
    parser.add_argument("--port", type=int, default=int(os.environ.get("INKCODE_PORT", "8000")))
    parser.add_argument("--data-dir", default=os.environ.get("INKCODE_DATA_DIR"))
    parser.add_argument("--configs-dir", default=os.environ.get("INKCODE_CONFIGS_DIR"))
    parser.add_argument("--workers", type=int, default=int(os.environ.get("INKCODE_WORKERS", "2")))
    args = parser.parse_args()
    if not args.data_dir or not args.configs_dir:
        parser.error("--data-dir and --configs-dir (or the INKCODE_* env vars) are required")

    import uvicorn

    app = create_app(
        ServiceSettings(
            data_dir=Path(args.data_dir),
            configs_dir=Path(args.configs_dir),
            workers=args.workers,
        )
    )
    uvicorn.run(app, host=args.host, port=args.port)


if __name__ == "__main__":
    main()
