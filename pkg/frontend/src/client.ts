// HTTP client for the condition service. The service is the single source
// of truth for validation, interpolation, rasterization, and inference.

import { ConditionFile } from "./types.js";

export type ValidationDetail = { path: string; message: string };

export class ValidationError extends Error {
  constructor(public readonly details: ValidationDetail[]) {
    super(details.map((d) => `${d.path}: ${d.message}`).join("; "));
  }
}

export type RasterizeResponse = { n: number; frames: string[] };

export type JobStatus = {
  job_id: string;
  status: "queued" | "running" | "done" | "failed";
  frames?: string[];
  n?: number;
  error?: string | null;
  output_path?: string | null;
};

export type InferRequest = {
  conditions: ConditionFile;
  human_image?: string; // base64 PNG
  object_image?: string;
  audio_features?: number[][];
  resolution?: [number, number];
  steps?: number;
  seed?: number;
  segment_len?: number;
  overlap?: number;
};

async function parseOrThrow(response: Response): Promise<any> {
  const body = await response.json();
  if (response.status === 422) {
    throw new ValidationError(body.detail as ValidationDetail[]);
  }
  if (!response.ok) {
    throw new Error(`${response.status}: ${JSON.stringify(body)}`);
  }
  return body;
}

export class ServiceClient {
  constructor(private readonly baseUrl: string) {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async health(): Promise<boolean> {
    try {
      const r = await fetch(this.url("/healthz"));
      return r.ok;
    } catch {
      return false;
    }
  }

  async validate(conditions: ConditionFile): Promise<{ valid: boolean; n: number }> {
    const r = await fetch(this.url("/conditions/validate"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(conditions),
    });
    return parseOrThrow(r);
  }

  async interpolate(
    conditions: ConditionFile,
    editedFrameIndices: number[]
  ): Promise<ConditionFile> {
    const r = await fetch(this.url("/conditions/interpolate"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ conditions, edited_frame_indices: editedFrameIndices }),
    });
    const body = await parseOrThrow(r);
    return body.conditions as ConditionFile;
  }

  async rasterize(
    conditions: ConditionFile,
    resolution: [number, number] = [64, 64],
    what: "both" | "pose" | "object" = "both"
  ): Promise<RasterizeResponse> {
    const r = await fetch(this.url("/rasterize"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ conditions, resolution, what }),
    });
    return parseOrThrow(r);
  }

  async submitInfer(request: InferRequest): Promise<JobStatus> {
    const r = await fetch(this.url("/jobs/infer"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
    });
    return parseOrThrow(r);
  }

  async jobStatus(jobId: string): Promise<JobStatus> {
    const r = await fetch(this.url(`/jobs/${jobId}`));
    return parseOrThrow(r);
  }

  async waitForJob(
    jobId: string,
    opts: { intervalMs?: number; timeoutMs?: number } = {}
  ): Promise<JobStatus> {
    const interval = opts.intervalMs ?? 250;
    const deadline = Date.now() + (opts.timeoutMs ?? 120000);
    for (;;) {
      const status = await this.jobStatus(jobId);
      if (status.status === "done" || status.status === "failed") return status;
      if (Date.now() > deadline) throw new Error(`job ${jobId} timed out`);
      await new Promise((resolve) => setTimeout(resolve, interval));
    }
  }

  async fetchFrameBytes(framePath: string): Promise<Uint8Array> {
    const r = await fetch(this.url(framePath));
    if (!r.ok) throw new Error(`frame fetch failed: ${r.status}`);
    return new Uint8Array(await r.arrayBuffer());
  }
}
