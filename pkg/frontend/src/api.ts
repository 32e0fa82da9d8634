// Thin typed client over the HTTP API. Every UI capability maps 1:1 onto a
// documented endpoint; no world-generation logic lives in the browser.

import type {
  ApiError,
  GenerateResponse,
  QueryResponse,
  SceneGraphDoc,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiRequestError extends Error {
  constructor(public status: number, public code: string, message: string) {
    super(message);
  }
}

async function unwrap<T>(res: Response): Promise<T> {
  if (!res.ok) {
    let err: ApiError = { code: `HTTP${res.status}`, message: res.statusText };
    try {
      err = (await res.json()) as ApiError;
    } catch {
      /* non-JSON error body */
    }
    throw new ApiRequestError(res.status, err.code, err.message);
  }
  return (await res.json()) as T;
}

export class WorldgenClient {
  constructor(
    private base: string = "",
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private post(path: string, body: unknown): Promise<Response> {
    return this.fetchFn(this.base + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async generateFromGraph(graph: SceneGraphDoc, seed: number): Promise<GenerateResponse> {
    return unwrap(await this.post("/api/generate", { graph, seed }));
  }

  async generateFromPrompt(prompt: string, seed: number): Promise<GenerateResponse> {
    return unwrap(await this.post("/api/generate", { prompt, seed }));
  }

  async worldSvg(worldId: string): Promise<string> {
    const res = await this.fetchFn(`${this.base}/api/worlds/${worldId}/floorplan.svg`);
    if (!res.ok) throw new ApiRequestError(res.status, "UnknownWorld", worldId);
    return res.text();
  }

  async queryDb(
    text: string,
    k = 5,
    filter: Record<string, unknown> = {},
  ): Promise<QueryResponse> {
    return unwrap(await this.post("/api/db/query", { text, k, filter }));
  }

  async annotate(
    modelId: string,
    fields: Record<string, unknown>,
    overwrite = false,
  ): Promise<{ modelId: string; staged: boolean }> {
    return unwrap(
      await this.fetchFn(`${this.base}/api/db/annotations/${modelId}`, {
        method: "PUT",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ ...fields, overwrite }),
      }),
    );
  }

  async rebuildDb(): Promise<{ bundleVersion: number }> {
    return unwrap(await this.post("/api/db/rebuild", {}));
  }

  async dbVersion(): Promise<{ bundleVersion: number; records: number }> {
    return unwrap(await this.fetchFn(`${this.base}/api/db/version`));
  }

  async metricsCsv(worldIds: string[]): Promise<string> {
    const res = await this.fetchFn(
      `${this.base}/api/metrics?ids=${worldIds.join(",")}`,
    );
    if (!res.ok) throw new ApiRequestError(res.status, "MetricsError", res.statusText);
    return res.text();
  }
}
