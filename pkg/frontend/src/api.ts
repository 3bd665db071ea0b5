// Thin typed client for the service's JSON API.

import type {
  ConfigurationJson,
  DiversityReportJson,
  ExpandResponse,
  LabelSpec,
  ModelTree,
  RunSnapshot,
  ValidationReport,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public report?: ValidationReport,
  ) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let resp: Response;
  try {
    resp = await fetch(url, init);
  } catch (err) {
    throw new ApiError(0, "unreachable", `service unreachable: ${String(err)}`);
  }
  const body = await resp.json().catch(() => ({}));
  if (!resp.ok) {
    throw new ApiError(
      resp.status,
      body.code ?? "error",
      body.message ?? `HTTP ${resp.status}`,
      body.report,
    );
  }
  return body as T;
}

function post(body: unknown): RequestInit {
  return {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  };
}

export interface RunRequest {
  configuration: ConfigurationJson;
  label: LabelSpec;
  backend: string;
  format: "csv" | "json";
  seed?: number | null;
  count?: number | null;
}

export class ApiClient {
  constructor(private base: string = "") {}

  getModel(): Promise<ModelTree> {
    return request(`${this.base}/api/model`);
  }

  getLabels(): Promise<LabelSpec[]> {
    return request(`${this.base}/api/labels`);
  }

  validate(configuration: ConfigurationJson): Promise<ValidationReport> {
    return request(`${this.base}/api/validate`, post(configuration));
  }

  expand(configuration: ConfigurationJson, subsetSize?: number): Promise<ExpandResponse> {
    return request(
      `${this.base}/api/expand`,
      post({ configuration, subset_size: subsetSize ?? null }),
    );
  }

  createRun(req: RunRequest): Promise<{ run_id: string }> {
    return request(`${this.base}/api/runs`, post(req));
  }

  getRun(runId: string): Promise<RunSnapshot> {
    return request(`${this.base}/api/runs/${encodeURIComponent(runId)}`);
  }

  runDataUrl(runId: string, format: "csv" | "json"): string {
    return `${this.base}/api/runs/${encodeURIComponent(runId)}/data?format=${format}`;
  }

  metricsForRun(runId: string, bins = 20): Promise<DiversityReportJson> {
    return request(`${this.base}/api/metrics`, post({ run_id: runId, bins }));
  }
}
