import { describe, expect, it } from "vitest";

import { ServiceError, StudioClient } from "../src/client.js";
import { SketchJson } from "../src/types.js";

const SKETCH: SketchJson = {
  canvas: [512, 512],
  strokes: [{ parent: 0, label: null, points: [[0, 0], [10, 10]] }],
};

interface Call {
  url: string;
  body: unknown;
  resolve: (body: unknown, status?: number) => void;
}

/** fetch stand-in that parks every call until the test releases it. */
function fakeFetch() {
  const calls: Call[] = [];
  const fetchFn = (url: string, init?: RequestInit): Promise<Response> =>
    new Promise((resolve, reject) => {
      init?.signal?.addEventListener("abort", () =>
        reject(new DOMException("aborted", "AbortError")));
      calls.push({
        url,
        body: init?.body ? JSON.parse(init.body as string) : undefined,
        resolve: (body, status = 200) =>
          resolve(new Response(JSON.stringify(body), {
            status,
            headers: { "content-type": "application/json" },
          })),
      });
    });
  return { calls, fetchFn };
}

describe("StudioClient", () => {
  it("posts the sketch to /label and unwraps the response", async () => {
    const { calls, fetchFn } = fakeFetch();
    const client = new StudioClient("http://svc", fetchFn);
    const pending = client.label(SKETCH);
    expect(calls[0]!.url).toBe("http://svc/label");
    expect(calls[0]!.body).toEqual({ sketch: SKETCH, vote: true });
    calls[0]!.resolve({ sketch: SKETCH, labels: [5], confidences: [0.9] });
    const out = await pending;
    expect(out!.labels).toEqual([5]);
  });

  it("a newer label request supersedes the one in flight", async () => {
    const { calls, fetchFn } = fakeFetch();
    const client = new StudioClient("http://svc", fetchFn);
    const first = client.label(SKETCH);
    const second = client.label(SKETCH);
    expect(calls).toHaveLength(2);
    calls[1]!.resolve({ sketch: SKETCH, labels: [2], confidences: [1] });
    expect((await second)!.labels).toEqual([2]);
    // the first was aborted; it resolves to null, never an error
    expect(await first).toBeNull();
  });

  it("label and generate supersede independently", async () => {
    const { calls, fetchFn } = fakeFetch();
    const client = new StudioClient("http://svc", fetchFn);
    const label = client.label(SKETCH);
    const gen = client.generate(SKETCH, 7);
    expect(calls.map((c) => c.url)).toEqual(["http://svc/label", "http://svc/generate"]);
    calls[0]!.resolve({ sketch: SKETCH, labels: [3], confidences: [1] });
    calls[1]!.resolve({ image: "abc", seed: 7 });
    expect((await label)!.labels).toEqual([3]);
    expect((await gen)!.image).toBe("abc");
  });

  it("carries the seed and optional reference face", async () => {
    const { calls, fetchFn } = fakeFetch();
    const client = new StudioClient("http://svc", fetchFn);
    void client.generate(SKETCH, 42, "b64bytes");
    expect(calls[0]!.body).toEqual({ sketch: SKETCH, seed: 42, face: "b64bytes" });
  });

  it("surfaces the service error envelope as ServiceError", async () => {
    const { calls, fetchFn } = fakeFetch();
    const client = new StudioClient("http://svc", fetchFn);
    const pending = client.label(SKETCH);
    calls[0]!.resolve({ error: { message: "strokes[0].points: too short" } }, 400);
    await expect(pending).rejects.toThrowError(ServiceError);
    const again = client.label(SKETCH);
    calls[1]!.resolve({ error: { message: "nope" } }, 400);
    await expect(again).rejects.toThrow("nope");
  });

  it("strips a trailing slash from the base url", async () => {
    const { calls, fetchFn } = fakeFetch();
    const client = new StudioClient("http://svc:9000/", fetchFn);
    void client.categories();
    expect(calls[0]!.url).toBe("http://svc:9000/categories");
  });
});
