/** HTTP client for the labeling/generation service.

 * Label and generate each allow one in-flight request; firing a new one
 * aborts and supersedes the previous, so a burst of edits settles on the
 * newest state and stale responses never reach the caller.
 */

import { Category, SketchJson } from "./types.js";

export class ServiceError extends Error {
  readonly status: number;

  constructor(status: number, message: string) {
    super(message);
    this.status = status;
  }
}

/** Resolution of a supersedable request: dropped ones yield null. */
export type Maybe<T> = T | null;

export interface LabelResponse {
  sketch: SketchJson;
  labels: number[];
  confidences: number[];
}

export interface GenerateResponse {
  image: string;
  seed: number;
}

export interface InterpolateResponse {
  images: string[];
  ts: number[];
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

interface Channel {
  ticket: number;
  controller: AbortController | null;
}

async function errorOf(res: Response): Promise<ServiceError> {
  let message = `HTTP ${res.status}`;
  try {
    const body = (await res.json()) as { error?: { message?: string } };
    if (body.error?.message) message = body.error.message;
  } catch {
    /* non-JSON error body, keep the status line */
  }
  return new ServiceError(res.status, message);
}

export class StudioClient {
  readonly baseUrl: string;
  private readonly fetchFn: FetchLike;
  private labelChannel: Channel = { ticket: 0, controller: null };
  private generateChannel: Channel = { ticket: 0, controller: null };

  constructor(baseUrl: string, fetchFn: FetchLike = fetch) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  async categories(): Promise<Category[]> {
    const res = await this.fetchFn(`${this.baseUrl}/categories`);
    if (!res.ok) throw await errorOf(res);
    return (await res.json()) as Category[];
  }

  /** Labels a sketch; returns null if a newer label request took over. */
  async label(sketch: SketchJson, vote = true): Promise<Maybe<LabelResponse>> {
    return this.supersedable(this.labelChannel, "/label", { sketch, vote });
  }

  /** Generates a face; returns null if a newer generation took over. */
  async generate(
    sketch: SketchJson,
    seed: number,
    face?: string,
  ): Promise<Maybe<GenerateResponse>> {
    const body: Record<string, unknown> = { sketch, seed };
    if (face !== undefined) body.face = face;
    return this.supersedable(this.generateChannel, "/generate", body);
  }

  async interpolate(
    a: SketchJson,
    b: SketchJson,
    steps: number,
    seed: number,
  ): Promise<InterpolateResponse> {
    return this.post("/interpolate", { a, b, steps, seed });
  }

  private async post<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
    const res = await this.fetchFn(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    if (!res.ok) throw await errorOf(res);
    return (await res.json()) as T;
  }

  private async supersedable<T>(
    channel: Channel,
    path: string,
    body: unknown,
  ): Promise<Maybe<T>> {
    channel.controller?.abort();
    const controller = new AbortController();
    channel.controller = controller;
    const ticket = ++channel.ticket;
    try {
      const out = await this.post<T>(path, body, controller.signal);
      return channel.ticket === ticket ? out : null;
    } catch (err) {
      if (channel.ticket !== ticket || controller.signal.aborted) return null;
      throw err;
    } finally {
      if (channel.ticket === ticket) channel.controller = null;
    }
  }
}
