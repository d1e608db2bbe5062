/** Typed client for the annot project API.
 *
 * Every server interaction of the UI goes through this module, and only the
 * documented endpoints appear here; no verdict is ever computed client-side.
 */

import type {
  AnnotationsJson,
  BlockJson,
  ModelJson,
  OntologyJson,
  ProjectInfo,
  ProvenanceJson,
  ReportJson,
  SrKind,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(`API error ${status}: ${JSON.stringify(detail)}`);
  }

  get isStaleVersion(): boolean {
    return this.status === 409;
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    throw new ApiError(response.status, body && (body as { detail?: unknown }).detail ? (body as { detail: unknown }).detail : body);
  }
  return body as T;
}

export interface NewAnnotation {
  version: number;
  element: string;
  sr: SrKind;
  domain: BlockJson;
  provenance?: ProvenanceJson;
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private url(path: string): string {
    return this.baseUrl + path;
  }

  getProject(): Promise<ProjectInfo> {
    return request(this.url("/api/project"));
  }

  getModel(): Promise<ModelJson> {
    return request(this.url("/api/model"));
  }

  getOntology(namespace: string): Promise<OntologyJson> {
    return request(this.url(`/api/ontology/${encodeURIComponent(namespace)}`));
  }

  getBlock(namespace: string, main: string, depth?: number): Promise<{ version: number; block: BlockJson }> {
    const params = new URLSearchParams({ main });
    if (depth !== undefined) params.set("depth", String(depth));
    return request(this.url(`/api/ontology/${encodeURIComponent(namespace)}/block?${params}`));
  }

  listAnnotations(): Promise<AnnotationsJson> {
    return request(this.url("/api/annotations"));
  }

  postAnnotation(payload: NewAnnotation): Promise<{ version: number; id: string }> {
    return request(this.url("/api/annotations"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  deleteAnnotation(id: string, version: number): Promise<{ version: number }> {
    return request(
      this.url(`/api/annotations/${encodeURIComponent(id)}?version=${version}`),
      { method: "DELETE" },
    );
  }

  reason(): Promise<ReportJson> {
    return request(this.url("/api/reason"), { method: "POST" });
  }

  latestReport(): Promise<ReportJson> {
    return request(this.url("/api/report/latest"));
  }

  acceptSuggestion(id: string, version: number): Promise<{ version: number; annotationId: string }> {
    return request(this.url(`/api/suggestions/${encodeURIComponent(id)}/accept`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ version }),
    });
  }

  rejectSuggestion(id: string, version: number): Promise<{ version: number }> {
    return request(this.url(`/api/suggestions/${encodeURIComponent(id)}/reject`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ version }),
    });
  }
}
