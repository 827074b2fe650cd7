// Thin client over the documented service endpoints; nothing else is called.

import { readSseStream } from "./sse.js";
import type {
  HealthInfo, SessionData, SessionSettings, StreamEvent, UploadResult,
} from "./types.js";

export class ApiError extends Error {
  constructor(message: string, readonly status: number, readonly code?: string) {
    super(message);
  }
}

async function jsonOrThrow(response: Response): Promise<Record<string, unknown>> {
  let body: Record<string, unknown> = {};
  try {
    body = (await response.json()) as Record<string, unknown>;
  } catch {
    // non-JSON error bodies fall through to the status check
  }
  if (!response.ok) {
    const message = typeof body.error === "string" ? body.error : `HTTP ${response.status}`;
    throw new ApiError(message, response.status, body.code as string | undefined);
  }
  return body;
}

export class StforgeClient {
  constructor(readonly baseUrl: string = "") {}

  async createSession(settings: SessionSettings): Promise<SessionData> {
    const response = await fetch(`${this.baseUrl}/sessions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ schema_version: 1, settings }),
    });
    const body = await jsonOrThrow(response);
    return body.session as unknown as SessionData;
  }

  async fetchSession(sessionId: string): Promise<SessionData> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}`);
    const body = await jsonOrThrow(response);
    return body.session as unknown as SessionData;
  }

  async streamMessage(
    sessionId: string,
    text: string,
    onEvent: (event: StreamEvent) => void,
    model?: string,
  ): Promise<void> {
    const payload: Record<string, unknown> = { schema_version: 1, text };
    if (model) payload.model = model;
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/message`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (!response.ok) {
      await jsonOrThrow(response);
    }
    if (!response.body) {
      throw new ApiError("response carried no stream body", response.status);
    }
    await readSseStream(response.body, onEvent);
  }

  async uploadFile(filename: string, data: ArrayBuffer | Uint8Array): Promise<UploadResult> {
    const response = await fetch(
      `${this.baseUrl}/upload?filename=${encodeURIComponent(filename)}`,
      { method: "POST", body: data as BodyInit },
    );
    const body = await jsonOrThrow(response);
    return body as unknown as UploadResult;
  }

  async health(): Promise<HealthInfo> {
    const response = await fetch(`${this.baseUrl}/health`);
    return (await jsonOrThrow(response)) as unknown as HealthInfo;
  }
}
