import type { PipelineResultView } from "./types.js";

export interface OverlayRect {
  index: number;
  left: number;
  top: number;
  width: number;
  height: number;
  color: string;
}

/** Level colors cycle past the palette end; deep nesting stays legible. */
export const INDENT_PALETTE: readonly string[] = [
  "#4c78a8",
  "#f58518",
  "#54a24b",
  "#b279a2",
  "#e45756",
  "#72b7b2",
];

export function colorForLevel(level: number): string {
  const palette = INDENT_PALETTE;
  return palette[((level % palette.length) + palette.length) % palette.length] as string;
}

/**
 * One rectangle per recognized line, scaled from image pixels to the rendered
 * pane and colored by the line's reconstructed indent level.
 *
 * The rect count always equals the raw OCR line count; lines the indent stage
 * did not cover fall back to level 0 rather than being dropped.
 */
export function computeOverlayRects(
  result: PipelineResultView,
  renderedWidth: number,
  renderedHeight: number,
): OverlayRect[] {
  if (!(renderedWidth > 0) || !(renderedHeight > 0)) {
    throw new Error(`rendered size must be positive, got ${renderedWidth}x${renderedHeight}`);
  }
  const scaleX = renderedWidth / result.raw_ocr.image_width;
  const scaleY = renderedHeight / result.raw_ocr.image_height;
  return result.raw_ocr.lines.map((line, index) => {
    const level = result.indented.lines[index]?.level ?? 0;
    return {
      index,
      left: line.box.x_min * scaleX,
      top: line.box.y_min * scaleY,
      width: (line.box.x_max - line.box.x_min) * scaleX,
      height: (line.box.y_max - line.box.y_min) * scaleY,
      color: colorForLevel(level),
    };
  });
}

/** Replace the container's children with one positioned box per rect. */
export function renderOverlay(container: HTMLElement, rects: OverlayRect[]): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  for (const rect of rects) {
    const box = doc.createElement("div");
    box.className = "overlay-box";
    box.dataset["index"] = String(rect.index);
    box.style.left = `${rect.left}px`;
    box.style.top = `${rect.top}px`;
    box.style.width = `${rect.width}px`;
    box.style.height = `${rect.height}px`;
    box.style.borderColor = rect.color;
    container.appendChild(box);
  }
}

/** Highlight box `index`, or clear every highlight when index is null. */
export function highlightBox(container: HTMLElement, index: number | null): void {
  for (const child of Array.from(container.children)) {
    const box = child as HTMLElement;
    box.classList.toggle("highlight", index !== null && box.dataset["index"] === String(index));
  }
}
