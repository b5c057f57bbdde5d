/** Wire types for the review service's /api/v1 endpoints. Field names and
 * shapes mirror the server's JSON exactly; nothing here is recomputed
 * client-side. */

export interface BoundingBoxView {
  x_min: number;
  y_min: number;
  x_max: number;
  y_max: number;
}

export interface OcrLineView {
  text: string;
  box: BoundingBoxView;
}

export interface RawOcrView {
  image_width: number;
  image_height: number;
  provider_id: string;
  lines: OcrLineView[];
}

export interface IndentedLineView {
  text: string;
  level: number;
}

export interface StageTimingView {
  stage: string;
  seconds: number;
}

export interface PipelineResultView {
  raw_ocr: RawOcrView;
  indented: { lines: IndentedLineView[] };
  corrected_code: string;
  config_id: string;
  stage_timings: StageTimingView[];
}

export type JobStateName = "queued" | "ocr" | "indent" | "correct" | "done" | "failed";

export interface JobRecord {
  job_id: string;
  state: JobStateName;
  config_id: string;
  media_type: string;
  created_at: number;
  updated_at: number;
  error: string | null;
  result: PipelineResultView | null;
  edited_code: string | null;
  audit: string[];
  last_recorrect_error: string | null;
}

export interface ConfigView {
  config_id: string;
  label: string;
  section: string;
  indent_mode: string;
  strategy: string;
  default: boolean;
}

export const RECORRECT_STRATEGIES = ["none", "simple", "chain_of_thought"] as const;

export type RecorrectStrategy = (typeof RECORRECT_STRATEGIES)[number];
