/**
 * Thin typed client for the orkgdk service. The explorer only ever talks to
 * the JSON endpoints; it never touches the store directly.
 */

import type { ComparisonTable, TimelineDoc } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function getJson<T>(url: string): Promise<T | null> {
  const response = await fetch(url, { headers: { Accept: "application/json" } });
  if (response.status === 404) {
    return null;
  }
  if (!response.ok) {
    let code = "Error";
    let message = response.statusText;
    try {
      const body = (await response.json()) as { code?: string; message?: string };
      code = body.code ?? code;
      message = body.message ?? message;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, code, message);
  }
  return (await response.json()) as T;
}

export function fetchComparison(base: string, id: string): Promise<ComparisonTable | null> {
  return getJson<ComparisonTable>(`${base}/api/comparisons/${encodeURIComponent(id)}`);
}

export function fetchTimeline(base: string, id: string): Promise<TimelineDoc | null> {
  return getJson<TimelineDoc>(`${base}/api/comparisons/${encodeURIComponent(id)}/timeline`);
}
