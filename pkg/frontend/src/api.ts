/** Typed client for the tweetkit HTTP/JSON service.
 *
 * Every response is validated against a zod schema before it reaches a
 * view, so contract drift fails loudly instead of rendering garbage.
 */
import { z } from "zod";

export const errorEnvelope = z.object({
  error: z.object({ code: z.string(), message: z.string() }),
  schema_version: z.string(),
});

const envelope = {
  schema_version: z.string(),
  model_revision: z.string(),
};

export const classifyResponse = z.object({
  ...envelope,
  distribution: z.record(z.number()),
  label: z.string().optional(),
  labels: z.array(z.string()).optional(),
  top_k: z
    .array(z.object({ label: z.string(), probability: z.number() }))
    .optional(),
});

export const nerResponse = z.object({
  ...envelope,
  entities: z.array(
    z.object({
      surface: z.string(),
      type: z.string(),
      start: z.number().int(),
      end: z.number().int(),
      confidence: z.number(),
    }),
  ),
});

export const maskResponse = z.object({
  ...envelope,
  masks: z.array(
    z.object({
      mask_index: z.number().int(),
      candidates: z.array(
        z.object({ token: z.string(), probability: z.number() }),
      ),
    }),
  ),
});

export const similarityResponse = z.object({ ...envelope, score: z.number() });

export const hashtagResponse = z.object({
  ...envelope,
  buckets: z.array(
    z.object({
      start: z.string(),
      counts: z.record(z.number().int()),
      total: z.number().int(),
    }),
  ),
  bucket_width_seconds: z.number(),
  tweets_analyzed: z.number().int(),
  capped: z.boolean(),
});

export const tasksResponse = z.object({
  schema_version: z.string(),
  tasks: z.array(
    z.object({
      name: z.string(),
      problem_type: z.string(),
      labels: z.array(z.string()),
      metric: z.string().nullable(),
      needs_target: z.boolean(),
    }),
  ),
});

export type ClassifyResponse = z.infer<typeof classifyResponse>;
export type NerResponse = z.infer<typeof nerResponse>;
export type MaskResponse = z.infer<typeof maskResponse>;
export type SimilarityResponse = z.infer<typeof similarityResponse>;
export type HashtagResponse = z.infer<typeof hashtagResponse>;
export type TasksResponse = z.infer<typeof tasksResponse>;

export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async request<T>(
    path: string,
    schema: z.ZodType<T>,
    body?: unknown,
  ): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, {
      method: body === undefined ? "GET" : "POST",
      headers: { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await resp.json();
    if (!resp.ok) {
      const err = errorEnvelope.parse(payload);
      throw new ApiError(err.error.code, err.error.message, resp.status);
    }
    return schema.parse(payload);
  }

  tasks(): Promise<TasksResponse> {
    return this.request("/tasks", tasksResponse);
  }

  classify(
    task: string,
    text: string,
    opts: { language?: string; target?: string; top_k?: number } = {},
  ): Promise<ClassifyResponse> {
    return this.request(`/classify/${task}`, classifyResponse, {
      text,
      ...opts,
    });
  }

  ner(text: string): Promise<NerResponse> {
    return this.request("/ner", nerResponse, { text });
  }

  mask(text: string, k = 5): Promise<MaskResponse> {
    return this.request("/mask", maskResponse, { text, k });
  }

  similarity(textA: string, textB: string): Promise<SimilarityResponse> {
    return this.request("/similarity", similarityResponse, {
      text_a: textA,
      text_b: textB,
    });
  }

  hashtagAnalysis(body: {
    query: string;
    start: string;
    end: string;
    task?: string;
    bucket_width_seconds?: number;
  }): Promise<HashtagResponse> {
    return this.request("/hashtag-analysis", hashtagResponse, body);
  }
}

/**
 * Serializes a view's requests: responses arriving after a newer request
 * was issued are discarded (single UI thread, monotonically increasing
 * sequence number per view).
 */
export class ViewController<Req, Res> {
  private seq = 0;

  constructor(
    private readonly fetcher: (req: Req) => Promise<Res>,
    private readonly onResult: (res: Res) => void,
    private readonly onError: (err: unknown) => void = () => {},
  ) {}

  async submit(req: Req): Promise<void> {
    const token = ++this.seq;
    try {
      const res = await this.fetcher(req);
      if (token === this.seq) this.onResult(res);
    } catch (err) {
      if (token === this.seq) this.onError(err);
    }
  }
}
