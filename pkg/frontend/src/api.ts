import type { ConfigView, JobRecord, RecorrectStrategy } from "./types.js";

/** Subset of the fetch response surface the client touches. Narrow on purpose
 * so tests can hand in plain objects. */
export interface FetchResponseLike {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
  text(): Promise<string>;
  arrayBuffer(): Promise<ArrayBuffer>;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<FetchResponseLike>;

/** Service rejection, surfaced with the server's reason and detail verbatim. */
export class ApiError extends Error {
  readonly status: number;
  readonly reason: string;
  readonly detail: string;

  constructor(status: number, reason: string, detail: string) {
    super(`${reason}: ${detail}`);
    this.name = "ApiError";
    this.status = status;
    this.reason = reason;
    this.detail = detail;
  }
}

async function rejectionFrom(response: FetchResponseLike): Promise<ApiError> {
  // Rejections are {reason, detail} JSON; anything else is passed through raw.
  const raw = await response.text();
  try {
    const body = JSON.parse(raw) as { reason?: unknown; detail?: unknown };
    if (typeof body.reason === "string" && typeof body.detail === "string") {
      return new ApiError(response.status, body.reason, body.detail);
    }
  } catch {
    // fall through to the raw-body error
  }
  return new ApiError(response.status, "HttpError", raw);
}

/** Thin client over the review service. All transcription logic stays server
 * side; this class only moves bytes and JSON. */
export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl = "", fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  private async checked(response: FetchResponseLike): Promise<FetchResponseLike> {
    if (!response.ok) {
      throw await rejectionFrom(response);
    }
    return response;
  }

  async listConfigs(): Promise<ConfigView[]> {
    const response = await this.checked(await this.fetchFn(this.url("/api/v1/configs")));
    return (await response.json()) as ConfigView[];
  }

  async submitJob(image: Blob, filename: string, configId?: string): Promise<string> {
    const form = new FormData();
    form.append("image", image, filename);
    if (configId) {
      form.append("config_id", configId);
    }
    const response = await this.checked(
      await this.fetchFn(this.url("/api/v1/jobs"), { method: "POST", body: form }),
    );
    const body = (await response.json()) as { job_id: string };
    return body.job_id;
  }

  async getJob(jobId: string): Promise<JobRecord> {
    const response = await this.checked(
      await this.fetchFn(this.url(`/api/v1/jobs/${jobId}`)),
    );
    return (await response.json()) as JobRecord;
  }

  async saveEdit(jobId: string, code: string): Promise<JobRecord> {
    const response = await this.checked(
      await this.fetchFn(this.url(`/api/v1/jobs/${jobId}/edit`), {
        method: "PUT",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ code }),
      }),
    );
    return (await response.json()) as JobRecord;
  }

  async recorrect(jobId: string, strategy: RecorrectStrategy): Promise<JobRecord> {
    const response = await this.checked(
      await this.fetchFn(this.url(`/api/v1/jobs/${jobId}/recorrect`), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ strategy }),
      }),
    );
    return (await response.json()) as JobRecord;
  }

  /** Export as raw bytes so a download round-trips the server's content
   * exactly; going through text would invite newline or encoding drift. */
  async exportBytes(jobId: string): Promise<Uint8Array> {
    const response = await this.checked(
      await this.fetchFn(this.url(`/api/v1/jobs/${jobId}/export`)),
    );
    return new Uint8Array(await response.arrayBuffer());
  }
}
