/**
 * HTTP client for the processing service. One generate request in flight at
 * a time: a new submit cancels the previous one.
 *
 * The raw response bytes are kept alongside the parsed document so the
 * "export STC" control can hand back exactly what the service produced.
 */

import { StcDocument, ValidationIssue, validateStc } from "./stc.js";

export type ConfigOverrides = Record<string, string>;

export type ProcessOutcome =
  | { kind: "success"; bytes: ArrayBuffer; doc: StcDocument }
  | { kind: "error"; status: number; code: string; message: string; details: unknown[] }
  | { kind: "schema"; issues: ValidationIssue[] }
  | { kind: "network"; message: string }
  | { kind: "cancelled" };

export interface SubmitInput {
  dataset: Blob;
  metadata: Blob;
  task: string;
  overrides?: ConfigOverrides;
}

export class ProcessClient {
  private inFlight: AbortController | null = null;

  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  processUrl(overrides: ConfigOverrides = {}): string {
    const url = new URL("/api/v1/process", this.baseUrl);
    for (const [name, value] of Object.entries(overrides)) {
      if (value !== "") url.searchParams.set(name, value);
    }
    return url.toString();
  }

  async submit(input: SubmitInput): Promise<ProcessOutcome> {
    this.inFlight?.abort();
    const controller = new AbortController();
    this.inFlight = controller;

    const form = new FormData();
    form.append("dataset", input.dataset, "dataset.csv");
    form.append("metadata", input.metadata, "metadata.csv");
    form.append("task", input.task);

    let response: Response;
    try {
      response = await this.fetchImpl(this.processUrl(input.overrides ?? {}), {
        method: "POST",
        body: form,
        signal: controller.signal,
      });
    } catch (error) {
      if (controller.signal.aborted) return { kind: "cancelled" };
      return { kind: "network", message: error instanceof Error ? error.message : String(error) };
    } finally {
      if (this.inFlight === controller) this.inFlight = null;
    }

    if (!response.ok) {
      return await errorOutcome(response);
    }

    const bytes = await response.arrayBuffer();
    let raw: unknown;
    try {
      raw = JSON.parse(new TextDecoder().decode(bytes));
    } catch {
      return { kind: "schema", issues: [{ path: "$", message: "response is not JSON" }] };
    }
    const parsed = validateStc(raw);
    if (!parsed.ok) return { kind: "schema", issues: parsed.issues };
    return { kind: "success", bytes, doc: parsed.doc };
  }

  cancel(): void {
    this.inFlight?.abort();
    this.inFlight = null;
  }
}

async function errorOutcome(response: Response): Promise<ProcessOutcome> {
  let code = `HTTP_${response.status}`;
  let message = response.statusText || "request failed";
  let details: unknown[] = [];
  try {
    const body: unknown = await response.json();
    if (typeof body === "object" && body !== null) {
      const record = body as Record<string, unknown>;
      if (typeof record["code"] === "string") code = record["code"];
      if (typeof record["message"] === "string") message = record["message"];
      if (Array.isArray(record["details"])) details = record["details"];
    }
  } catch {
    // non-JSON error body: keep the status-derived fallbacks
  }
  return { kind: "error", status: response.status, code, message, details };
}
