// Scripted server helpers shared by the frontend tests.

import type { CompileReport, PathRecord, SessionData } from "../src/types.js";

export function sseBody(frames: Array<[string, unknown]>, chunkSize = 48): ReadableStream<Uint8Array> {
  const encoder = new TextEncoder();
  const text = frames
    .map(([name, data]) => `event: ${name}\ndata: ${JSON.stringify(data)}\n\n`)
    .join("");
  // Re-chunk at an arbitrary size so frame boundaries land mid-chunk.
  const chunks: Uint8Array[] = [];
  for (let i = 0; i < text.length; i += chunkSize) {
    chunks.push(encoder.encode(text.slice(i, i + chunkSize)));
  }
  return new ReadableStream({
    start(controller) {
      for (const chunk of chunks) controller.enqueue(chunk);
      controller.close();
    },
  });
}

export function successReport(attempt = 1): CompileReport {
  return {
    status: "Success", diagnostics: [], attempt,
    elapsed_ms: 2.5, compiler_id: "internal-oracle/melsec-iqr",
  };
}

export function failedReport(attempt = 1): CompileReport {
  return {
    status: "Failed",
    diagnostics: [{
      code: "E001", category: "UndeclaredVariable", severity: "Error",
      span: { start_line: 2, start_col: 5, end_line: 2, end_col: 10 },
      message: "'ghost' is not declared and is not a registered label",
    }],
    attempt,
    elapsed_ms: 3.1,
    compiler_id: "internal-oracle/melsec-iqr",
  };
}

export function pathRecord(label: string, overrides: Partial<PathRecord> = {}): PathRecord {
  return {
    config_label: label,
    code: "PROGRAM Demo\n    run_flag := TRUE;\nEND_PROGRAM",
    explanation: "toggles the flag",
    final_status: { kind: "compiled_clean", repairs: 0, reason: null },
    reports: [successReport()],
    warnings: [],
    ...overrides,
  };
}

export const THREE_LABELS = ["stub-rag", "stub-standard", "stub-local-rag"];

export function initialStreamFrames(): Array<[string, unknown]> {
  const frames: Array<[string, unknown]> = [];
  for (const label of THREE_LABELS) {
    frames.push(["delta", { schema_version: 1, label, text: "working on " }]);
    frames.push(["delta", { schema_version: 1, label, text: `${label}…` }]);
  }
  for (const label of THREE_LABELS) {
    frames.push(["compile", { schema_version: 1, label, ...successReport() }]);
    frames.push(["path_done", { schema_version: 1, label, ...pathRecord(label) }]);
  }
  frames.push(["done", {
    schema_version: 1,
    session_id: "abc123",
    paths: THREE_LABELS.map((label) => pathRecord(label)),
  }]);
  return frames;
}

export function sessionSnapshot(): SessionData {
  return {
    id: "abc123",
    selected_model: null,
    settings: { expansion: false, draft_mode: false, compile_enabled: true },
    turns: [
      { role: "user", text: "blink a lamp", model_label: null, compile_report: null, timestamp: 1, liked: false },
      ...THREE_LABELS.map((label) => ({
        role: "assistant" as const,
        text: "PROGRAM Demo\n    run_flag := TRUE;\nEND_PROGRAM",
        model_label: label,
        compile_report: successReport(),
        timestamp: 2,
        liked: false,
      })),
    ],
  };
}

export interface RecordedRequest {
  url: string;
  method: string;
  body: unknown;
}

export function scriptedFetch(
  routes: Record<string, (request: RecordedRequest) => Response>,
  log: RecordedRequest[],
): typeof fetch {
  return (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const method = init?.method ?? "GET";
    let body: unknown = null;
    if (typeof init?.body === "string") {
      try { body = JSON.parse(init.body); } catch { body = init.body; }
    }
    const request = { url, method, body };
    log.push(request);
    for (const [key, handler] of Object.entries(routes)) {
      const [routeMethod, routePath] = key.split(" ");
      if (method === routeMethod && url.split("?")[0] === routePath) {
        return handler(request);
      }
    }
    return new Response(JSON.stringify({ error: `no route for ${method} ${url}` }), { status: 404 });
  }) as typeof fetch;
}

export function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}
