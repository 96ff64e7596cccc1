// REST client for the annotation service. The UI never touches files
// directly; everything persists through these endpoints so the server
// validates every save.

import type { TaskDoc } from "./model.js";

export interface PageInfo {
  page_id: string;
  mockup_image: string;
  annotated: boolean;
}

export interface LoadedDocument {
  document: TaskDoc | null;
  revision: string;
}

export interface ApiError {
  status: number;
  error: string;
  message: string;
}

export interface ReportRow {
  target_id: string;
  page_id: string;
  tier_name: string;
  L: number;
  B: number;
  matched_locator: string | null;
  diagnostics: string;
}

export interface Report {
  per_annotation: ReportRow[];
  aggregate: { S: number; mean_L: number; mean_B: number; N: number };
}

async function fail(response: Response): Promise<never> {
  let error = "error";
  let message = response.statusText;
  try {
    const body = await response.json();
    error = body.error ?? error;
    message = body.message ?? message;
  } catch {
    // non-JSON error body: keep the status text
  }
  throw { status: response.status, error, message } satisfies ApiError;
}

export class Api {
  constructor(private base: string = "") {}

  async pages(): Promise<PageInfo[]> {
    const response = await fetch(`${this.base}/api/annotation/pages`);
    if (!response.ok) return fail(response);
    return response.json();
  }

  async load(): Promise<LoadedDocument> {
    const response = await fetch(`${this.base}/api/annotation/document`);
    if (!response.ok) return fail(response);
    return response.json();
  }

  async save(document: TaskDoc, revision: string): Promise<string> {
    const response = await fetch(`${this.base}/api/annotation/document`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ document, revision }),
    });
    if (!response.ok) return fail(response);
    const body = await response.json();
    return body.revision;
  }

  imageUrl(pageId: string): string {
    return `${this.base}/api/annotation/image/${encodeURIComponent(pageId)}`;
  }

  async report(): Promise<Report | null> {
    const response = await fetch(`${this.base}/api/annotation/report`);
    if (response.status === 404) return null;
    if (!response.ok) return fail(response);
    return response.json();
  }
}
