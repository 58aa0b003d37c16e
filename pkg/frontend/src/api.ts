/** Typed client for the geobook HTTP API.
 *
 * Server-sent events are consumed through a fetch-stream parser rather
 * than the EventSource global, so the same client runs in the browser
 * and under the node test harness.
 */

import type {
  BookSnapshot,
  DiscoveryResponse,
  EditAck,
  EditOp,
  FigureState,
  KnowledgeObject,
  ObjectSummary,
  ProveResponse,
  RelationCandidate,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export class ConflictError extends ApiError {}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      /* non-JSON error body */
    }
    if (response.status === 409) throw new ConflictError(409, detail);
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export interface SseEvent {
  event: string;
  data: unknown;
}

export type SseHandler = (event: SseEvent) => void;

export interface SseSubscription {
  close(): void;
  done: Promise<void>;
}

/** Minimal SSE reader over fetch body streams. */
export function subscribeSse(url: string, handler: SseHandler): SseSubscription {
  const controller = new AbortController();
  const done = (async () => {
    const response = await fetch(url, {
      signal: controller.signal,
      headers: { accept: "text/event-stream" },
    });
    if (!response.ok || !response.body) {
      throw new ApiError(response.status, "event stream unavailable");
    }
    const reader = response.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    let eventName = "message";
    let dataLines: string[] = [];
    for (;;) {
      const { value, done: finished } = await reader.read();
      if (finished) break;
      buffer += decoder.decode(value, { stream: true });
      let newline;
      while ((newline = buffer.indexOf("\n")) >= 0) {
        const line = buffer.slice(0, newline).replace(/\r$/, "");
        buffer = buffer.slice(newline + 1);
        if (line.startsWith("event: ")) {
          eventName = line.slice(7);
        } else if (line.startsWith("data: ")) {
          dataLines.push(line.slice(6));
        } else if (line === "") {
          if (dataLines.length) {
            handler({ event: eventName, data: JSON.parse(dataLines.join("\n")) });
          }
          eventName = "message";
          dataLines = [];
        }
      }
    }
  })().catch((error: unknown) => {
    // after close() any network teardown error is expected noise
    if (!controller.signal.aborted && (error as Error).name !== "AbortError") {
      throw error;
    }
  });
  return { close: () => controller.abort(), done };
}

export class GeobookClient {
  constructor(public readonly base: string) {}

  private url(path: string): string {
    return `${this.base}${path}`;
  }

  listObjects(keywords?: string[]): Promise<{ objects: ObjectSummary[] }> {
    const suffix = keywords?.length
      ? `?keywords=${encodeURIComponent(keywords.join(","))}`
      : "";
    return request(this.url(`/objects${suffix}`));
  }

  getObject(id: string): Promise<KnowledgeObject> {
    return request(this.url(`/objects/${id}`));
  }

  createObject(data: Partial<KnowledgeObject>): Promise<{ id: string }> {
    return request(this.url("/objects"), {
      method: "POST",
      body: JSON.stringify(data),
    });
  }

  updateObject(id: string, data: Partial<KnowledgeObject>): Promise<{ id: string }> {
    return request(this.url(`/objects/${id}`), {
      method: "PUT",
      body: JSON.stringify(data),
    });
  }

  queryRelation(
    params: { source?: string; target?: string },
    kind: string,
  ): Promise<{ ids: string[] }> {
    const search = new URLSearchParams();
    if (params.source) search.set("source", params.source);
    if (params.target) search.set("target", params.target);
    search.set("kind", kind);
    return request(this.url(`/relations?${search}`));
  }

  discover(objectId: string): Promise<DiscoveryResponse> {
    return request(this.url(`/discover/${objectId}`), { method: "POST" });
  }

  acceptCandidates(candidates: RelationCandidate[]): Promise<{ added: number }> {
    return request(this.url("/discover/accept"), {
      method: "POST",
      body: JSON.stringify({ candidates }),
    });
  }

  listBooks(): Promise<{ books: { id: string; title: string; serial: number }[] }> {
    return request(this.url("/books"));
  }

  getBook(bookId: string): Promise<BookSnapshot> {
    return request(this.url(`/books/${bookId}`));
  }

  postEdit(bookId: string, serial: number, op: EditOp): Promise<EditAck> {
    return request(this.url(`/books/${bookId}/edits`), {
      method: "POST",
      body: JSON.stringify({ serial, op }),
    });
  }

  bookEvents(bookId: string, handler: SseHandler): SseSubscription {
    return subscribeSse(this.url(`/books/${bookId}/events`), handler);
  }

  async renderHtml(bookId: string, locale: string): Promise<string> {
    const response = await fetch(
      this.url(`/books/${bookId}/render?locale=${locale}&format=html`),
    );
    if (!response.ok) throw new ApiError(response.status, "render failed");
    return response.text();
  }

  prove(objectId: string, direction = "both"): Promise<ProveResponse> {
    return request(this.url(`/prove/${objectId}`), {
      method: "POST",
      body: JSON.stringify({ direction }),
    });
  }

  evaluateFigure(
    objectId: string,
    assignment?: Record<string, number[] | number>,
  ): Promise<FigureState> {
    return request(this.url(`/figure/${objectId}/evaluate`), {
      method: "POST",
      body: JSON.stringify(assignment ? { assignment } : {}),
    });
  }
}
