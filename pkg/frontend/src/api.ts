/**
 * Thin typed client over the service HTTP API. Every number the UI shows
 * comes out of these calls; no priority math happens in the browser.
 */

export interface ConsistencySnapshot {
  slot: string;
  revision: number;
  total: number;
  filled: number;
  missing: string[];
  complete: boolean;
  weights?: Record<string, number>;
  lambda_max?: number;
  cr?: number;
  verdict?: "pass" | "warn" | "fail";
  threshold?: number;
}

export interface RankingView {
  alternatives: Record<string, number>;
  order: string[];
  renormalized: Record<string, number>;
}

export interface WhatIfResult {
  baseline: RankingView;
  perturbed: RankingView;
  delta: Record<string, number>;
}

export interface WhatIfOverride {
  slot: string;
  pair: string;
  value: string;
}

export interface SolveOptions {
  policy?: string;
  strict?: boolean;
}

export interface ModelEnvelope {
  id: string;
  revision: number;
  missing: Record<string, string[]>;
  document: any;
}

export interface ResultDocument {
  engine_version: string;
  model_digest: string;
  options: Record<string, unknown>;
  nodes: Record<string, string>;
  slots: Record<string, {
    elements: string[];
    weights: number[];
    lambda_max: number;
    ci: number;
    cr: number;
    verdict: string;
    threshold: number;
  }>;
  cluster_weights: Record<string, Record<string, number>>;
  matrices: Record<string, { index: string[]; rows: number[][] }>;
  ranking: RankingView & {
    raw_limit_column: Record<string, number>;
    convergence: Record<string, unknown>;
  };
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: any,
  ) {
    super(typeof detail?.message === "string" ? detail.message : `HTTP ${status}`);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(method: string, path: string, body?: unknown): Promise<any> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const res = await this.fetchImpl(this.base + path, init);
    const text = await res.text();
    const data = text ? JSON.parse(text) : null;
    if (!res.ok) throw new ApiError(res.status, data?.detail ?? data);
    return data;
  }

  health(): Promise<{ status: string; engine_version: string }> {
    return this.request("GET", "/api/health");
  }

  listModels(): Promise<{ models: { id: string; revision: number; title: string | null; complete: boolean }[] }> {
    return this.request("GET", "/api/models");
  }

  createModel(document: unknown): Promise<{ id: string; revision: number }> {
    return this.request("POST", "/api/models", document);
  }

  getModel(id: string): Promise<ModelEnvelope> {
    return this.request("GET", `/api/models/${id}`);
  }

  putJudgment(
    id: string,
    slot: string,
    pair: string,
    value: string,
    revision: number,
  ): Promise<ConsistencySnapshot> {
    const path =
      `/api/models/${id}/judgments/` +
      `${encodeURIComponent(slot)}/${encodeURIComponent(pair)}`;
    return this.request("PUT", path, { value, revision });
  }

  solve(id: string, options?: SolveOptions): Promise<ResultDocument> {
    return this.request("POST", `/api/models/${id}/solve`, options ?? {});
  }

  whatif(
    id: string,
    overrides: WhatIfOverride[],
    options?: SolveOptions,
  ): Promise<WhatIfResult> {
    return this.request("POST", `/api/models/${id}/whatif`, {
      overrides,
      ...(options ?? {}),
    });
  }
}
