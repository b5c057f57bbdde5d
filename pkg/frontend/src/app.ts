import { ApiError } from "./api.js";
import { EditBuffer, initialBuffer, lineIndexAt } from "./editor.js";
import { colorForLevel, computeOverlayRects, highlightBox, renderOverlay } from "./overlay.js";
import { pollUntilSettled } from "./poll.js";
import { renderProgress } from "./progress.js";
import { RECORRECT_STRATEGIES } from "./types.js";
import type { ConfigView, JobRecord, RecorrectStrategy } from "./types.js";

/** Everything the app calls on the service client. ApiClient satisfies this;
 * tests substitute scripted fakes. */
export interface ReviewClient {
  listConfigs(): Promise<ConfigView[]>;
  submitJob(image: Blob, filename: string, configId?: string): Promise<string>;
  getJob(jobId: string): Promise<JobRecord>;
  saveEdit(jobId: string, code: string): Promise<JobRecord>;
  recorrect(jobId: string, strategy: RecorrectStrategy): Promise<JobRecord>;
  exportBytes(jobId: string): Promise<Uint8Array>;
}

export interface AppElements {
  fileInput: HTMLInputElement;
  configSelect: HTMLSelectElement;
  uploadButton: HTMLButtonElement;
  progress: HTMLElement;
  banner: HTMLElement;
  photo: HTMLImageElement;
  overlay: HTMLElement;
  gutter: HTMLElement;
  editor: HTMLTextAreaElement;
  saveButton: HTMLButtonElement;
  strategySelect: HTMLSelectElement;
  recorrectButton: HTMLButtonElement;
  exportButton: HTMLButtonElement;
  auditList: HTMLElement;
  reviewPane: HTMLElement;
}

interface WindowTarget {
  addEventListener(type: string, listener: (event: Event) => void): void;
  removeEventListener(type: string, listener: (event: Event) => void): void;
}

export interface AppDeps {
  client: ReviewClient;
  elements: AppElements;
  /** Object URL (or any displayable URL) for the picked photo. */
  imageUrlFor: (image: Blob) => string;
  /** Hand exported bytes to the platform, e.g. as a file download. */
  download: (filename: string, bytes: Uint8Array) => void;
  windowTarget?: WindowTarget;
  pollIntervalMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

const DEFAULT_LINE_HEIGHT = 20;

function parsePx(value: string, fallback: number): number {
  const parsed = Number.parseFloat(value);
  return Number.isFinite(parsed) ? parsed : fallback;
}

/**
 * Single-page review client: upload a photo, watch the job advance stage by
 * stage, then review the transcription next to the image with one colored box
 * per recognized line, edit it, re-run correction, and export the bytes.
 *
 * No transcription logic lives here. The editor shows exactly what the
 * service sent and exports exactly what the service returns.
 */
export class App {
  private readonly client: ReviewClient;
  private readonly el: AppElements;
  private readonly imageUrlFor: (image: Blob) => string;
  private readonly download: (filename: string, bytes: Uint8Array) => void;
  private readonly pollIntervalMs: number;
  private readonly sleep?: (ms: number) => Promise<void>;

  private job: JobRecord | null = null;
  private buffer: EditBuffer | null = null;

  constructor(deps: AppDeps) {
    this.client = deps.client;
    this.el = deps.elements;
    this.imageUrlFor = deps.imageUrlFor;
    this.download = deps.download;
    this.pollIntervalMs = deps.pollIntervalMs ?? 1000;
    this.sleep = deps.sleep;

    this.fillStrategySelect();
    this.el.reviewPane.hidden = true;
    this.el.banner.hidden = true;

    this.el.uploadButton.addEventListener("click", () => void this.handleUpload());
    this.el.saveButton.addEventListener("click", () => void this.saveEdit());
    this.el.recorrectButton.addEventListener("click", () => void this.runRecorrect());
    this.el.exportButton.addEventListener("click", () => void this.exportCode());

    this.el.editor.addEventListener("input", () => this.onEditorInput());
    this.el.editor.addEventListener("mousemove", (event) =>
      this.handleEditorHover((event as MouseEvent).offsetY),
    );
    this.el.editor.addEventListener("mouseleave", () => highlightBox(this.el.overlay, null));

    this.el.gutter.addEventListener("mouseover", (event) => {
      const index = (event.target as HTMLElement).dataset["index"];
      if (index !== undefined) {
        highlightBox(this.el.overlay, Number(index));
      }
    });
    this.el.gutter.addEventListener("mouseleave", () => highlightBox(this.el.overlay, null));

    deps.windowTarget?.addEventListener("beforeunload", (event) => this.guardUnload(event));
  }

  get currentJob(): JobRecord | null {
    return this.job;
  }

  get dirty(): boolean {
    return this.buffer?.dirty ?? false;
  }

  /** Unsaved edits block navigation until saved or abandoned on purpose. */
  guardUnload(event: { preventDefault(): void; returnValue?: unknown }): void {
    if (this.dirty) {
      event.preventDefault();
      event.returnValue = "";
    }
  }

  async loadConfigs(): Promise<void> {
    const configs = await this.client.listConfigs();
    const doc = this.el.configSelect.ownerDocument;
    this.el.configSelect.replaceChildren();
    for (const config of configs) {
      const option = doc.createElement("option");
      option.value = config.config_id;
      option.textContent = config.label;
      option.selected = config.default;
      this.el.configSelect.appendChild(option);
    }
  }

  async handleUpload(): Promise<JobRecord | null> {
    const file = this.el.fileInput.files?.[0];
    if (!file) {
      this.showError("choose an image first");
      return null;
    }
    return this.submitFile(file, file.name);
  }

  async submitFile(image: Blob, filename: string): Promise<JobRecord | null> {
    this.clearBanner();
    this.el.reviewPane.hidden = true;
    this.job = null;
    try {
      const configId = this.el.configSelect.value || undefined;
      const jobId = await this.client.submitJob(image, filename, configId);
      this.el.photo.src = this.imageUrlFor(image);
      renderProgress(this.el.progress, "queued");
      const record = await pollUntilSettled(this.client, jobId, {
        intervalMs: this.pollIntervalMs,
        sleep: this.sleep,
        onUpdate: (update) => renderProgress(this.el.progress, update.state),
      });
      if (record.state === "failed") {
        this.job = record;
        this.showError(record.error ?? "job failed");
        return record;
      }
      this.enterReview(record);
      return record;
    } catch (error) {
      this.surface(error);
      return null;
    }
  }

  private enterReview(record: JobRecord): void {
    this.job = record;
    const text = initialBuffer(record);
    this.buffer = new EditBuffer(text);
    this.el.editor.value = text;
    this.el.saveButton.disabled = true;
    this.renderOverlayForCurrentSize();
    this.renderGutter();
    this.renderAudit();
    this.el.reviewPane.hidden = false;
  }

  /** Scale boxes to the displayed photo; before layout (or headless) the
   * client size is 0 and image pixels are used one to one. */
  renderOverlayForCurrentSize(): void {
    const result = this.job?.result;
    if (!result) {
      return;
    }
    const width = this.el.photo.clientWidth || result.raw_ocr.image_width;
    const height = this.el.photo.clientHeight || result.raw_ocr.image_height;
    renderOverlay(this.el.overlay, computeOverlayRects(result, width, height));
  }

  private renderGutter(): void {
    const result = this.job?.result;
    if (!result) {
      return;
    }
    const doc = this.el.gutter.ownerDocument;
    this.el.gutter.replaceChildren();
    result.indented.lines.forEach((line, index) => {
      const band = doc.createElement("div");
      band.className = "gutter-band";
      band.dataset["index"] = String(index);
      band.style.backgroundColor = colorForLevel(line.level);
      band.title = line.text;
      this.el.gutter.appendChild(band);
    });
  }

  private renderAudit(): void {
    const doc = this.el.auditList.ownerDocument;
    this.el.auditList.replaceChildren();
    (this.job?.audit ?? []).forEach((text, index) => {
      const item = doc.createElement("li");
      item.dataset["index"] = String(index);
      item.textContent = text;
      this.el.auditList.appendChild(item);
    });
  }

  private onEditorInput(): void {
    if (!this.buffer) {
      return;
    }
    this.buffer.current = this.el.editor.value;
    this.el.saveButton.disabled = !this.buffer.dirty;
  }

  handleEditorHover(offsetY: number): void {
    const lineCount = this.job?.result?.raw_ocr.lines.length ?? 0;
    if (lineCount === 0) {
      return;
    }
    const view = this.el.editor.ownerDocument.defaultView;
    const style = view?.getComputedStyle(this.el.editor);
    const lineHeight = parsePx(style?.lineHeight ?? "", DEFAULT_LINE_HEIGHT);
    const paddingTop = parsePx(style?.paddingTop ?? "", 0);
    const index = lineIndexAt(offsetY, this.el.editor.scrollTop, paddingTop, lineHeight);
    highlightBox(this.el.overlay, index < lineCount ? index : null);
  }

  async saveEdit(): Promise<void> {
    if (!this.job) {
      return;
    }
    try {
      const text = this.el.editor.value;
      this.job = await this.client.saveEdit(this.job.job_id, text);
      this.buffer?.markSaved(text);
      this.el.saveButton.disabled = true;
      this.clearBanner();
    } catch (error) {
      this.surface(error);
    }
  }

  async runRecorrect(): Promise<void> {
    if (!this.job) {
      return;
    }
    try {
      const strategy = this.el.strategySelect.value as RecorrectStrategy;
      const record = await this.client.recorrect(this.job.job_id, strategy);
      this.job = record;
      if (record.last_recorrect_error !== null) {
        this.showError(record.last_recorrect_error);
        return;
      }
      this.clearBanner();
      this.renderAudit();
      if (this.buffer && !this.buffer.dirty) {
        const text = initialBuffer(record);
        this.buffer.resetTo(text);
        this.el.editor.value = text;
      }
    } catch (error) {
      this.surface(error);
    }
  }

  async exportCode(): Promise<void> {
    if (!this.job) {
      return;
    }
    try {
      const bytes = await this.client.exportBytes(this.job.job_id);
      this.download(`${this.job.job_id}.py`, bytes);
    } catch (error) {
      this.surface(error);
    }
  }

  private fillStrategySelect(): void {
    const doc = this.el.strategySelect.ownerDocument;
    this.el.strategySelect.replaceChildren();
    for (const strategy of RECORRECT_STRATEGIES) {
      const option = doc.createElement("option");
      option.value = strategy;
      option.textContent = strategy.replace(/_/g, " ");
      this.el.strategySelect.appendChild(option);
    }
  }

  private surface(error: unknown): void {
    if (error instanceof ApiError) {
      this.showError(error.message);
    } else {
      this.showError(String(error));
    }
  }

  private showError(text: string): void {
    this.el.banner.textContent = text;
    this.el.banner.classList.add("error");
    this.el.banner.hidden = false;
  }

  private clearBanner(): void {
    this.el.banner.textContent = "";
    this.el.banner.classList.remove("error");
    this.el.banner.hidden = true;
  }
}
