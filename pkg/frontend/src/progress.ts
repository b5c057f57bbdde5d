import type { JobStateName } from "./types.js";

/** Pipeline stages in execution order; failed is rendered as a banner, not a
 * progress step. */
export const STAGE_ORDER: readonly JobStateName[] = [
  "queued",
  "ocr",
  "indent",
  "correct",
  "done",
];

export function stageIndex(state: JobStateName): number {
  const index = STAGE_ORDER.indexOf(state);
  return index === -1 ? STAGE_ORDER.length : index;
}

/** Render one step per stage, marking everything before the current state as
 * done. A failed job freezes the steps where they were. */
export function renderProgress(container: HTMLElement, state: JobStateName): void {
  const doc = container.ownerDocument;
  const current = stageIndex(state);
  container.replaceChildren();
  container.dataset["state"] = state;
  STAGE_ORDER.forEach((stage, index) => {
    const step = doc.createElement("span");
    step.className = "progress-step";
    step.textContent = stage;
    if (index < current) {
      step.classList.add("done");
    } else if (index === current) {
      step.classList.add("current");
    }
    container.appendChild(step);
  });
}
