import type { JobRecord, PipelineResultView } from "../src/types.js";

/** Three-line program over a 1000x800 image, levels 0/1/1. */
export function sampleResult(): PipelineResultView {
  return {
    raw_ocr: {
      image_width: 1000,
      image_height: 800,
      provider_id: "replay",
      lines: [
        { text: "def f(x):", box: { x_min: 40, y_min: 50, x_max: 420, y_max: 90 } },
        { text: "if x > 0:", box: { x_min: 120, y_min: 110, x_max: 430, y_max: 150 } },
        { text: "return x", box: { x_min: 122, y_min: 170, x_max: 400, y_max: 210 } },
      ],
    },
    indented: {
      lines: [
        { text: "def f(x):", level: 0 },
        { text: "if x > 0:", level: 1 },
        { text: "return x", level: 1 },
      ],
    },
    corrected_code: "def f(x):\n    if x > 0:\n        return x",
    config_id: "replay-relative-none",
    stage_timings: [
      { stage: "ocr", seconds: 0.01 },
      { stage: "indent", seconds: 0.002 },
      { stage: "correct", seconds: 0.0 },
    ],
  };
}

export function doneJob(overrides: Partial<JobRecord> = {}): JobRecord {
  return {
    job_id: "job-1",
    state: "done",
    config_id: "replay-relative-none",
    media_type: "image/png",
    created_at: 1000,
    updated_at: 1001,
    error: null,
    result: sampleResult(),
    edited_code: null,
    audit: [],
    last_recorrect_error: null,
    ...overrides,
  };
}
