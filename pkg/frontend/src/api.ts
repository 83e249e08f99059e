/**
 * Thin fetch client for the meshlink server.
 *
 * Mutations (opening a session, posting session actions, uploading corpora)
 * are serialized: at most one is in flight at a time, later ones wait for
 * the earlier ones to settle.  Reads are not gated and may overlap.
 */

import {
  CorpusUpload,
  DiagramPayload,
  SessionView,
  parseDiagramPayload,
} from "./schema";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Non-2xx response; `detail` carries the server's explanation when present. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

export interface SessionActionBody {
  action: "mark" | "attach" | "targets" | "suggest";
  descriptor?: string;
  corpus_id?: string;
  strict?: boolean;
  band?: [number, number];
}

async function errorDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === "string") {
      return body.detail;
    }
    return JSON.stringify(body);
  } catch {
    return response.statusText || "request failed";
  }
}

export class ApiClient {
  private readonly fetchImpl: FetchLike;
  private mutationTail: Promise<unknown> = Promise.resolve();

  constructor(
    readonly baseUrl: string = "",
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((input, init) => globalThis.fetch(input, init));
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      throw new ApiError(response.status, await errorDetail(response));
    }
    return response;
  }

  private async requestJson<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.request(path, init);
    return (await response.json()) as T;
  }

  /** Queue a mutation behind any mutation already in flight. */
  private enqueue<T>(work: () => Promise<T>): Promise<T> {
    const next = this.mutationTail.then(work, work);
    this.mutationTail = next.then(
      () => undefined,
      () => undefined,
    );
    return next;
  }

  private postJson<T>(path: string, body: unknown): Promise<T> {
    return this.enqueue(() =>
      this.requestJson<T>(path, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
      }),
    );
  }

  uploadCorpus(content: BlobPart, label?: string): Promise<CorpusUpload> {
    return this.enqueue(() => {
      const form = new FormData();
      form.append("file", new Blob([content]), "corpus.txt");
      if (label !== undefined) {
        form.append("label", label);
      }
      return this.requestJson<CorpusUpload>("/corpora", { method: "POST", body: form });
    });
  }

  getCorpus(corpusId: string): Promise<Record<string, unknown>> {
    return this.requestJson(`/corpora/${corpusId}`);
  }

  /** Fetch and validate a structured diagram document. */
  async getDiagram(corpusId: string): Promise<DiagramPayload> {
    const data = await this.requestJson<unknown>(
      `/corpora/${corpusId}/diagram?format=structured-document`,
    );
    return parseDiagramPayload(data);
  }

  openSession(
    corpusId: string,
    term: string,
    params?: Record<string, unknown>,
  ): Promise<SessionView> {
    const body: Record<string, unknown> = { corpus_id: corpusId, term };
    if (params !== undefined) {
      body.params = params;
    }
    return this.postJson("/sessions", body);
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.requestJson(`/sessions/${sessionId}`);
  }

  action(sessionId: string, body: SessionActionBody): Promise<SessionView> {
    return this.postJson(`/sessions/${sessionId}/actions`, body);
  }
}
