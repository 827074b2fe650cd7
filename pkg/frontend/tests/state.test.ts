import { describe, expect, it } from "vitest";

import {
  applyEvent, beginTurn, fromSession, initialState, statusLabel, transcript,
} from "../src/state.js";
import {
  THREE_LABELS, failedReport, initialStreamFrames, pathRecord, sessionSnapshot,
} from "./helpers.js";

function playInitialStream() {
  const state = initialState();
  state.sessionId = "abc123";
  beginTurn(state, "blink a lamp");
  for (const [event, data] of initialStreamFrames()) {
    applyEvent(state, { event: event as never, data: data as Record<string, unknown> });
  }
  return state;
}

describe("stream event folding", () => {
  it("accumulates deltas per path", () => {
    const state = initialState();
    beginTurn(state, "q");
    applyEvent(state, { event: "delta", data: { label: "a", text: "he" } });
    applyEvent(state, { event: "delta", data: { label: "a", text: "llo" } });
    applyEvent(state, { event: "delta", data: { label: "b", text: "other" } });
    expect(state.panels.get("a")?.streamText).toBe("hello");
    expect(state.panels.get("b")?.streamText).toBe("other");
    expect(state.panelOrder).toEqual(["a", "b"]);
  });

  it("an initial exchange produces three finished panels", () => {
    const state = playInitialStream();
    expect(state.panelOrder).toEqual(THREE_LABELS);
    for (const label of THREE_LABELS) {
      const panel = state.panels.get(label)!;
      expect(panel.done).toBe(true);
      expect(panel.code).toContain("PROGRAM Demo");
      expect(panel.reports.length).toBeGreaterThan(0);
    }
    expect(state.streaming).toBe(false);
    const assistants = state.messages.filter((m) => m.role === "assistant");
    expect(assistants.map((m) => m.modelLabel)).toEqual(THREE_LABELS);
  });

  it("compile events attach to their own path only", () => {
    const state = initialState();
    beginTurn(state, "q");
    applyEvent(state, { event: "compile", data: { label: "a", ...failedReport() } });
    expect(state.panels.get("a")?.reports[0].status).toBe("Failed");
    expect(state.panels.get("b")).toBeUndefined();
  });

  it("error events stop streaming and surface the message", () => {
    const state = initialState();
    beginTurn(state, "q");
    applyEvent(state, { event: "error", data: { message: "backend fell over" } });
    expect(state.error).toBe("backend fell over");
    expect(state.streaming).toBe(false);
  });

  it("a new turn clears the previous panels", () => {
    const state = playInitialStream();
    beginTurn(state, "follow up");
    expect(state.panelOrder).toEqual([]);
    expect(state.messages.at(-1)?.text).toBe("follow up");
  });
});

describe("session reconstruction", () => {
  it("rebuilds panels and history from the session endpoint payload", () => {
    const state = fromSession(sessionSnapshot());
    expect(state.sessionId).toBe("abc123");
    expect(state.messages).toHaveLength(4);
    expect(state.panelOrder).toEqual(THREE_LABELS);
    for (const label of THREE_LABELS) {
      const panel = state.panels.get(label)!;
      expect(panel.code).toContain("PROGRAM Demo");
      expect(panel.reports[0].status).toBe("Success");
      expect(panel.done).toBe(true);
    }
  });

  it("keeps the selected model", () => {
    const snapshot = sessionSnapshot();
    snapshot.selected_model = "stub-rag";
    expect(fromSession(snapshot).selectedModel).toBe("stub-rag");
  });

  it("prose answers land in the explanation slot", () => {
    const snapshot = sessionSnapshot();
    snapshot.turns[1].text = "Sorry, here is only an explanation.";
    const state = fromSession(snapshot);
    const panel = state.panels.get(snapshot.turns[1].model_label!)!;
    expect(panel.code).toBeNull();
    expect(panel.explanation).toContain("only an explanation");
  });
});

describe("transcript and labels", () => {
  it("renders a readable download transcript", () => {
    const text = transcript(playInitialStream());
    expect(text).toContain("You:");
    expect(text).toContain("blink a lamp");
    expect(text).toContain("Assistant [stub-rag]:");
    expect(text).toContain("compile: Success");
  });

  it("status labels cover the kinds", () => {
    expect(statusLabel({ kind: "compiled_clean", repairs: 0, reason: null }, true))
      .toBe("compiled clean");
    expect(statusLabel({ kind: "compiled_after_repair", repairs: 2, reason: null }, true))
      .toBe("compiled after 2 repair(s)");
    expect(statusLabel({ kind: "failed", repairs: 0, reason: "no_code" }, true))
      .toBe("failed (no_code)");
    expect(statusLabel(null, false)).toBe("draft (not compiled)");
  });

  it("path_done without trailing reports keeps streamed compile events", () => {
    const state = initialState();
    beginTurn(state, "q");
    applyEvent(state, { event: "compile", data: { label: "a", ...failedReport(1) } });
    const record = pathRecord("a", { reports: [], final_status: { kind: "failed", repairs: 0, reason: "budget_exhausted" } });
    applyEvent(state, { event: "path_done", data: record as unknown as Record<string, unknown> });
    expect(state.panels.get("a")?.reports).toHaveLength(1);
  });
});
