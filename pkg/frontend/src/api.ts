/** Thin typed client over the service's HTTP API (bearer-token auth). */

import type {
  AnnotationPayload,
  DivergencePayload,
  DocumentView,
  RelationPayload,
  RoundsReport,
  SemanticTypeInfo,
  SuggestionsResponse,
} from "./types.js";

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private token: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  setToken(token: string): void {
    this.token = token;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    raw = false,
  ): Promise<T> {
    const init: RequestInit = {
      method,
      headers: { Authorization: `Bearer ${this.token}` },
    };
    if (body !== undefined) {
      if (raw) {
        init.body = body as string;
      } else {
        init.body = JSON.stringify(body);
        (init.headers as Record<string, string>)["Content-Type"] = "application/json";
      }
    }
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const payload = await response.json();
        detail = payload.detail ?? detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string; documents: number }> {
    return this.request("GET", "/health");
  }

  registry(): Promise<{ types: SemanticTypeInfo[] }> {
    return this.request("GET", "/registry");
  }

  importRecords(jsonl: string): Promise<{ imported: string[]; warnings: string[] }> {
    return this.request("POST", "/import", jsonl, true);
  }

  getDocument(docId: string): Promise<DocumentView> {
    return this.request("GET", `/documents/${encodeURIComponent(docId)}`);
  }

  review(docId: string): Promise<{ id: string; status: string }> {
    return this.request("POST", `/documents/${encodeURIComponent(docId)}/review`);
  }

  redact(docId: string, start: number, end: number): Promise<{ text: string; status: string }> {
    return this.request("POST", `/documents/${encodeURIComponent(docId)}/redactions`, {
      start,
      end,
    });
  }

  suggestions(docId: string, start: number, end: number): Promise<SuggestionsResponse> {
    const query = `doc=${encodeURIComponent(docId)}&start=${start}&end=${end}`;
    return this.request("GET", `/suggestions?${query}`);
  }

  saveAnnotation(docId: string, annotation: Omit<AnnotationPayload, "id"> & { id?: string }) {
    return this.request<{ id: string }>(
      "POST",
      `/documents/${encodeURIComponent(docId)}/annotations`,
      annotation,
    );
  }

  submit(docId: string, annotations: AnnotationPayload[], relations: RelationPayload[]) {
    return this.request<{ submitted: boolean; document_status: string }>(
      "POST",
      `/documents/${encodeURIComponent(docId)}/annotations:submit`,
      { annotations, relations },
    );
  }

  divergence(docId: string): Promise<DivergencePayload> {
    return this.request("GET", `/documents/${encodeURIComponent(docId)}/divergence`);
  }

  adjudicate(docId: string, kept: string[], note?: string) {
    return this.request<Record<string, unknown>>(
      "POST",
      `/documents/${encodeURIComponent(docId)}/adjudication`,
      { kept, note },
    );
  }

  assign(body: {
    documents: string[];
    annotators: string[];
    adjudicators: string[];
    seed: number;
    round?: number;
  }) {
    return this.request<{ assignments: unknown[] }>("POST", "/assignments", body);
  }

  roundsReport(): Promise<RoundsReport> {
    return this.request("GET", "/reports/iaa?scope=round");
  }
}
