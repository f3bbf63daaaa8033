// Thin typed client for the analysis service. Every method returns parsed
// data plus the ETag the server reported, so callers can do compare-and-swap
// saves without tracking headers themselves.

import { AnalysisDoc } from "./model.js";
import { Stack } from "./reduction.js";
import { Finding } from "./validation.js";

export interface ListedAnalysis {
  id: string;
  meta: Record<string, string>;
  nv: number;
  maxDepth: number;
}

export interface LoadedAnalysis {
  doc: AnalysisDoc;
  etag: string;
  raw: string;
}

export type SaveResult =
  | { outcome: "saved"; etag: string; status: number }
  | { outcome: "conflict"; etag: string | null; message: string }
  | { outcome: "invalid"; findings: Finding[]; message: string }
  | { outcome: "error"; status: number; message: string };

export interface ServerReport {
  ok: boolean;
  findings: Finding[];
}

type FetchFn = typeof fetch;

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchFn = (...args) => fetch(...args),
  ) {}

  private url(path: string): string {
    return `${this.baseUrl.replace(/\/$/, "")}${path}`;
  }

  async list(): Promise<ListedAnalysis[]> {
    const resp = await this.fetchFn(this.url("/api/analyses"));
    if (!resp.ok) throw new Error(`list failed with ${resp.status}`);
    return (await resp.json()) as ListedAnalysis[];
  }

  async load(id: string): Promise<LoadedAnalysis> {
    const resp = await this.fetchFn(this.url(`/api/analyses/${id}`));
    if (!resp.ok) throw new Error(`load ${id} failed with ${resp.status}`);
    const raw = await resp.text();
    return {
      doc: JSON.parse(raw) as AnalysisDoc,
      etag: resp.headers.get("ETag") ?? "",
      raw,
    };
  }

  // PUT with If-Match when an etag is known; a missing etag means create.
  async save(id: string, doc: AnalysisDoc, etag: string | null): Promise<SaveResult> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (etag) headers["If-Match"] = etag;
    const resp = await this.fetchFn(this.url(`/api/analyses/${id}`), {
      method: "PUT",
      headers,
      body: JSON.stringify(doc),
    });
    if (resp.status === 200 || resp.status === 201) {
      const body = (await resp.json()) as { etag: string };
      return { outcome: "saved", etag: body.etag, status: resp.status };
    }
    const body = (await resp.json().catch(() => ({}))) as {
      message?: string;
      findings?: Finding[];
    };
    if (resp.status === 409) {
      return {
        outcome: "conflict",
        etag: resp.headers.get("ETag"),
        message: body.message ?? "stale document",
      };
    }
    if (resp.status === 422) {
      return {
        outcome: "invalid",
        findings: body.findings ?? [],
        message: body.message ?? "validation failed",
      };
    }
    return { outcome: "error", status: resp.status, message: body.message ?? `HTTP ${resp.status}` };
  }

  async validate(id: string, doc: AnalysisDoc | null): Promise<ServerReport> {
    const resp = await this.fetchFn(this.url(`/api/analyses/${id}/validate`), {
      method: "POST",
      headers: doc ? { "Content-Type": "application/json" } : {},
      body: doc ? JSON.stringify(doc) : undefined,
    });
    if (!resp.ok) throw new Error(`validate ${id} failed with ${resp.status}`);
    return (await resp.json()) as ServerReport;
  }

  async clusters(id: string): Promise<Stack> {
    const resp = await this.fetchFn(this.url(`/api/analyses/${id}/derived/clusters`));
    if (!resp.ok) throw new Error(`clusters ${id} failed with ${resp.status}`);
    return (await resp.json()) as Stack;
  }

  async corpusStats(): Promise<Record<string, unknown>> {
    const resp = await this.fetchFn(this.url("/api/corpus/stats"));
    if (!resp.ok) throw new Error(`corpus stats failed with ${resp.status}`);
    return (await resp.json()) as Record<string, unknown>;
  }
}
