import { ApiClient } from "./api.js";
import { App } from "./app.js";
import type { AppElements } from "./app.js";

function grab<T extends HTMLElement>(id: string): T {
  const element = document.getElementById(id);
  if (!element) {
    throw new Error(`missing element #${id}`);
  }
  return element as T;
}

const elements: AppElements = {
  fileInput: grab<HTMLInputElement>("file-input"),
  configSelect: grab<HTMLSelectElement>("config-select"),
  uploadButton: grab<HTMLButtonElement>("upload-button"),
  progress: grab("progress"),
  banner: grab("banner"),
  photo: grab<HTMLImageElement>("photo"),
  overlay: grab("overlay"),
  gutter: grab("gutter"),
  editor: grab<HTMLTextAreaElement>("editor"),
  saveButton: grab<HTMLButtonElement>("save-button"),
  strategySelect: grab<HTMLSelectElement>("strategy-select"),
  recorrectButton: grab<HTMLButtonElement>("recorrect-button"),
  exportButton: grab<HTMLButtonElement>("export-button"),
  auditList: grab("audit-list"),
  reviewPane: grab("review-pane"),
};

const app = new App({
  client: new ApiClient(""),
  elements,
  imageUrlFor: (image) => URL.createObjectURL(image),
  download: (filename, bytes) => {
    const blob = new Blob([bytes as BlobPart], { type: "text/plain" });
    const url = URL.createObjectURL(blob);
    const anchor = document.createElement("a");
    anchor.href = url;
    anchor.download = filename;
    anchor.click();
    URL.revokeObjectURL(url);
  },
  windowTarget: window,
});

elements.photo.addEventListener("load", () => app.renderOverlayForCurrentSize());
window.addEventListener("resize", () => app.renderOverlayForCurrentSize());

void app.loadConfigs();
