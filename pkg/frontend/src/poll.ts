import type { JobRecord } from "./types.js";

export interface JobFetcher {
  getJob(jobId: string): Promise<JobRecord>;
}

export interface PollOptions {
  intervalMs?: number;
  sleep?: (ms: number) => Promise<void>;
  onUpdate?: (record: JobRecord) => void;
}

const defaultSleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

/**
 * Poll a job until it settles as done or failed and return the final record.
 *
 * The loop awaits each GET before sleeping, so there is never more than one
 * request in flight for the job regardless of how slowly the service answers.
 */
export async function pollUntilSettled(
  client: JobFetcher,
  jobId: string,
  options: PollOptions = {},
): Promise<JobRecord> {
  const intervalMs = options.intervalMs ?? 1000;
  const sleep = options.sleep ?? defaultSleep;
  for (;;) {
    const record = await client.getJob(jobId);
    options.onUpdate?.(record);
    if (record.state === "done" || record.state === "failed") {
      return record;
    }
    await sleep(intervalMs);
  }
}
