import { describe, expect, it } from "vitest";

import {
  ApiClient,
  ApiError,
  ViewController,
  classifyResponse,
} from "../src/api.js";

import classifyFixture from "./fixtures/classify_sentiment.json";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

describe("ApiClient", () => {
  it("posts the request body and validates the response", async () => {
    const requests: { url: string; body: string }[] = [];
    const client = new ApiClient("http://svc", async (url, init) => {
      requests.push({ url: String(url), body: String(init?.body) });
      return jsonResponse(classifyFixture);
    });
    const res = await client.classify("sentiment", "lovely day", { top_k: 2 });
    expect(res.label).toBe("neutral");
    expect(requests[0]!.url).toBe("http://svc/classify/sentiment");
    expect(JSON.parse(requests[0]!.body)).toEqual({
      text: "lovely day",
      top_k: 2,
    });
  });

  it("turns error envelopes into typed ApiErrors", async () => {
    const client = new ApiClient("http://svc", async () =>
      jsonResponse(
        {
          error: { code: "unknown_task", message: "unknown task 'nope'" },
          schema_version: "1",
        },
        404,
      ),
    );
    await expect(client.classify("nope", "x")).rejects.toMatchObject({
      code: "unknown_task",
      status: 404,
    });
  });

  it("rejects contract drift", async () => {
    const client = new ApiClient("http://svc", async () =>
      jsonResponse({ totally: "unrelated" }),
    );
    await expect(client.similarity("a", "b")).rejects.toThrow();
  });
});

describe("ViewController stale-response discard", () => {
  it("drops a slow first response that arrives after a newer request", async () => {
    const pending = new Map<string, (v: string) => void>();
    const rendered: string[] = [];
    const controller = new ViewController<string, string>(
      (req) => new Promise((resolve) => pending.set(req, resolve)),
      (res) => rendered.push(res),
    );

    const first = controller.submit("first");
    const second = controller.submit("second");
    // interleaved: the older request resolves last
    pending.get("second")!("second-result");
    await second;
    pending.get("first")!("first-result");
    await first;

    expect(rendered).toEqual(["second-result"]);
  });

  it("renders each response when requests resolve in order", async () => {
    const rendered: string[] = [];
    const controller = new ViewController<string, string>(
      async (req) => `${req}-result`,
      (res) => rendered.push(res),
    );
    await controller.submit("a");
    await controller.submit("b");
    expect(rendered).toEqual(["a-result", "b-result"]);
  });

  it("discards stale errors too", async () => {
    const rendered: string[] = [];
    const errors: unknown[] = [];
    const pending = new Map<string, { resolve: (v: string) => void; reject: (e: unknown) => void }>();
    const controller = new ViewController<string, string>(
      (req) =>
        new Promise((resolve, reject) => pending.set(req, { resolve, reject })),
      (res) => rendered.push(res),
      (err) => errors.push(err),
    );
    const first = controller.submit("first");
    const second = controller.submit("second");
    pending.get("second")!.resolve("second-result");
    await second;
    pending.get("first")!.reject(new ApiError("rate_limited", "slow down", 429));
    await first;
    expect(rendered).toEqual(["second-result"]);
    expect(errors).toEqual([]);
  });
});

describe("schema fixtures", () => {
  it("the recorded service response satisfies the classify schema", () => {
    const parsed = classifyResponse.parse(classifyFixture);
    const total = Object.values(parsed.distribution).reduce((s, p) => s + p, 0);
    expect(total).toBeCloseTo(1.0, 6);
  });
});
