import type { JobRecord } from "./types.js";

/** Editor content for a finished job: a saved edit wins over the pipeline's
 * corrected code. The UI never derives text of its own. */
export function initialBuffer(record: JobRecord): string {
  if (record.edited_code !== null) {
    return record.edited_code;
  }
  if (record.result === null) {
    throw new Error(`job ${record.job_id} has no result to edit`);
  }
  return record.result.corrected_code;
}

/** Tracks the last server-acknowledged text so the UI knows when the buffer
 * is dirty. */
export class EditBuffer {
  private saved: string;
  current: string;

  constructor(text: string) {
    this.saved = text;
    this.current = text;
  }

  get dirty(): boolean {
    return this.current !== this.saved;
  }

  markSaved(text: string): void {
    this.saved = text;
    this.current = text;
  }

  resetTo(text: string): void {
    this.saved = text;
    this.current = text;
  }
}

/**
 * Line index under a pointer in a fixed line-height text area.
 *
 * offsetY is relative to the padding edge and does not move with scroll, so
 * the scroll offset is added back before dividing.
 */
export function lineIndexAt(
  offsetY: number,
  scrollTop: number,
  paddingTop: number,
  lineHeight: number,
): number {
  if (!(lineHeight > 0)) {
    throw new Error(`line height must be positive, got ${lineHeight}`);
  }
  const y = offsetY + scrollTop - paddingTop;
  return Math.max(0, Math.floor(y / lineHeight));
}
