/** Thin client for the annotation server's HTTP contract. */

import { AnnotationResponseBody, ApiError, TaskPayload } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function raiseForStatus(res: Response): Promise<void> {
  if (res.ok) return;
  let code = "unknown";
  let message = res.statusText;
  try {
    const body = await res.json();
    code = body.code ?? code;
    message = body.message ?? message;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(res.status, code, message);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  /** Next open task, or null when the queue is exhausted. */
  async getTask(annotator: string, relation: string): Promise<TaskPayload | null> {
    const params = new URLSearchParams({ annotator, relation });
    const res = await this.fetchImpl(`${this.baseUrl}/api/task?${params}`);
    if (res.status === 404) return null;
    await raiseForStatus(res);
    return (await res.json()) as TaskPayload;
  }

  async postResponse(body: AnnotationResponseBody): Promise<{ status: string }> {
    const res = await this.fetchImpl(`${this.baseUrl}/api/response`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    await raiseForStatus(res);
    return (await res.json()) as { status: string };
  }

  async deleteSentence(sentenceId: string): Promise<void> {
    const res = await this.fetchImpl(
      `${this.baseUrl}/api/sentence/${encodeURIComponent(sentenceId)}/delete`,
      { method: "POST" },
    );
    await raiseForStatus(res);
  }

  async ignoreSentence(sentenceId: string, relation: string): Promise<void> {
    const params = new URLSearchParams({ relation });
    const res = await this.fetchImpl(
      `${this.baseUrl}/api/sentence/${encodeURIComponent(sentenceId)}/ignore?${params}`,
      { method: "POST" },
    );
    await raiseForStatus(res);
  }
}
