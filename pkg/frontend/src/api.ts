import {
  GraphDoc,
  GraphDocSchema,
  LanguageDoc,
  LanguageSchema,
  EdgeDoc,
  EdgeSchema,
  ServiceError,
  ServiceErrorSchema,
  WhatIfParams,
  WhatIfResponse,
  WhatIfResponseSchema,
} from "./types.js";
import { z } from "zod";

/** Thrown for structured service errors so callers can render them inline. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: ServiceError
  ) {
    super(`${detail.code}: ${detail.message}`);
  }
}

async function parseFailure(response: Response): Promise<never> {
  let detail: ServiceError;
  try {
    detail = ServiceErrorSchema.parse(await response.json());
  } catch {
    detail = { code: "unknown", message: `HTTP ${response.status}` };
  }
  throw new ApiError(response.status, detail);
}

/**
 * Typed client for the graph service. The UI never computes graph values
 * itself; everything rendered comes through this client. whatif() keeps the
 * exact response text so the panel can display what the service said,
 * byte for byte.
 */
export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private url(path: string, params?: Record<string, string>): string {
    const u = new URL(path, this.baseUrl);
    for (const [k, v] of Object.entries(params ?? {})) {
      u.searchParams.set(k, v);
    }
    return u.toString();
  }

  private async getJson<T>(
    path: string,
    schema: z.ZodType<T>,
    params?: Record<string, string>
  ): Promise<T> {
    const response = await fetch(this.url(path, params));
    if (!response.ok) {
      return parseFailure(response);
    }
    return schema.parse(await response.json());
  }

  graph(): Promise<GraphDoc> {
    return this.getJson("/graph", GraphDocSchema);
  }

  languages(params?: Record<string, string>): Promise<LanguageDoc[]> {
    return this.getJson("/languages", z.array(LanguageSchema), params);
  }

  edges(params?: Record<string, string>): Promise<EdgeDoc[]> {
    return this.getJson("/edges", z.array(EdgeSchema), params);
  }

  analytics(): Promise<unknown> {
    return this.getJson("/analytics", z.unknown());
  }

  async whatif(
    params: WhatIfParams
  ): Promise<{ result: WhatIfResponse; raw: string }> {
    const response = await fetch(this.url("/whatif"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(params),
    });
    if (!response.ok) {
      return parseFailure(response);
    }
    const raw = await response.text();
    return { result: WhatIfResponseSchema.parse(JSON.parse(raw)), raw };
  }
}
