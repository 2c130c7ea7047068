/** WebSocket channel for per-stroke live labeling. */

import { SketchJson, StrokeJson } from "./types.js";

export interface LiveReply {
  labels?: number[];
  confidences?: number[];
  error?: { message: string };
}

/** The subset of the WebSocket API the channel needs; the browser class
 *  and the node `ws` package both satisfy it. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(type: "open" | "message" | "close" | "error",
                   handler: (event: any) => void): void;
}

export type SocketFactory = (url: string) => SocketLike;

export class LiveChannel {
  private socket: SocketLike | null = null;
  private replyQueue: ((reply: LiveReply) => void)[] = [];
  onReply: ((reply: LiveReply) => void) | null = null;

  constructor(
    private readonly url: string,
    private readonly makeSocket: SocketFactory,
  ) {}

  async connect(): Promise<void> {
    const socket = this.makeSocket(this.url);
    this.socket = socket;
    await new Promise<void>((resolve, reject) => {
      socket.addEventListener("open", () => resolve());
      socket.addEventListener("error", (e) => reject(e instanceof Error ? e : new Error("socket error")));
    });
    socket.addEventListener("message", (event: { data: unknown }) => {
      const reply = JSON.parse(String(event.data)) as LiveReply;
      const waiter = this.replyQueue.shift();
      if (waiter) waiter(reply);
      this.onReply?.(reply);
    });
  }

  close(): void {
    this.socket?.close();
    this.socket = null;
  }

  /** Sends one message and resolves with the matching reply (the service
   *  answers every message in order). */
  private request(message: unknown): Promise<LiveReply> {
    const socket = this.socket;
    if (!socket) return Promise.reject(new Error("not connected"));
    return new Promise((resolve) => {
      this.replyQueue.push(resolve);
      socket.send(JSON.stringify(message));
    });
  }

  addStroke(stroke: StrokeJson, canvas?: [number, number]): Promise<LiveReply> {
    const msg: Record<string, unknown> = { type: "add", stroke };
    if (canvas) msg.canvas = canvas;
    return this.request(msg);
  }

  replaceSketch(sketch: SketchJson): Promise<LiveReply> {
    return this.request({ type: "sketch", sketch });
  }

  reset(canvas?: [number, number]): Promise<LiveReply> {
    const msg: Record<string, unknown> = { type: "reset" };
    if (canvas) msg.canvas = canvas;
    return this.request(msg);
  }
}
