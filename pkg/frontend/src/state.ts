// UI session state and how stream events / session snapshots fold into it.
//
// Rendering is a pure function of this state, and the whole state is
// reconstructible from GET /sessions/{id}, which makes refresh safe.

import type {
  CompileReport, FinalStatus, PathRecord, SessionData, SessionSettings,
  StreamEvent,
} from "./types.js";

export interface PanelState {
  label: string;
  streamText: string;
  code: string | null;
  explanation: string | null;
  reports: CompileReport[];
  finalStatus: FinalStatus | null;
  done: boolean;
  warnings: string[];
}

export interface ChatMessage {
  role: "user" | "assistant";
  text: string;
  modelLabel: string | null;
  report: CompileReport | null;
}

export interface UiSessionState {
  sessionId: string | null;
  settings: SessionSettings;
  messages: ChatMessage[];
  panels: Map<string, PanelState>;
  panelOrder: string[];
  selectedModel: string | null;
  streaming: boolean;
  error: string | null;
  notice: string | null;
}

export function initialState(): UiSessionState {
  return {
    sessionId: null,
    settings: { expansion: false, draft_mode: false, compile_enabled: true },
    messages: [],
    panels: new Map(),
    panelOrder: [],
    selectedModel: null,
    streaming: false,
    error: null,
    notice: null,
  };
}

function panel(state: UiSessionState, label: string): PanelState {
  let entry = state.panels.get(label);
  if (!entry) {
    entry = {
      label, streamText: "", code: null, explanation: null,
      reports: [], finalStatus: null, done: false, warnings: [],
    };
    state.panels.set(label, entry);
    state.panelOrder.push(label);
  }
  return entry;
}

export function beginTurn(state: UiSessionState, text: string): void {
  state.messages.push({ role: "user", text, modelLabel: null, report: null });
  state.panels = new Map();
  state.panelOrder = [];
  state.streaming = true;
  state.error = null;
  state.notice = null;
}

export function applyEvent(state: UiSessionState, event: StreamEvent): void {
  const label = typeof event.data.label === "string" ? event.data.label : "";
  switch (event.event) {
    case "delta": {
      panel(state, label).streamText += String(event.data.text ?? "");
      break;
    }
    case "compile": {
      const { label: _label, schema_version: _v, ...report } = event.data;
      panel(state, label).reports.push(report as unknown as CompileReport);
      break;
    }
    case "path_done": {
      const record = event.data as unknown as PathRecord & { label?: string };
      const entry = panel(state, record.config_label ?? label);
      entry.code = record.code ?? null;
      entry.explanation = record.explanation ?? null;
      entry.finalStatus = record.final_status ?? null;
      entry.warnings = record.warnings ?? [];
      if (Array.isArray(record.reports) && record.reports.length > 0) {
        entry.reports = record.reports;
      }
      entry.done = true;
      break;
    }
    case "done": {
      const paths = (event.data.paths as PathRecord[] | undefined) ?? [];
      for (const record of paths) {
        const entry = panel(state, record.config_label);
        entry.done = true;
        state.messages.push({
          role: "assistant",
          text: record.code ?? record.explanation ?? "",
          modelLabel: record.config_label,
          report: record.reports.length > 0 ? record.reports[record.reports.length - 1] : null,
        });
      }
      state.streaming = false;
      break;
    }
    case "error": {
      state.error = String(event.data.message ?? "stream failed");
      state.streaming = false;
      break;
    }
  }
}

// Rebuild state from the session endpoint (page refresh, deep link).
export function fromSession(data: SessionData): UiSessionState {
  const state = initialState();
  state.sessionId = data.id;
  state.settings = data.settings;
  state.selectedModel = data.selected_model;

  for (const turn of data.turns) {
    state.messages.push({
      role: turn.role,
      text: turn.text,
      modelLabel: turn.model_label,
      report: turn.compile_report,
    });
  }
  // The answer panels mirror the assistant turns of the last exchange.
  for (let i = data.turns.length - 1; i >= 0; i--) {
    const turn = data.turns[i];
    if (turn.role === "user") break;
    if (!turn.model_label) continue;
    const entry = panel(state, turn.model_label);
    entry.done = true;
    if (looksLikeCode(turn.text)) {
      entry.code = turn.text;
    } else {
      entry.explanation = turn.text;
    }
    if (turn.compile_report) entry.reports = [turn.compile_report];
  }
  state.panelOrder.reverse();
  return state;
}

export function looksLikeCode(text: string): boolean {
  return /\b(PROGRAM|FUNCTION_BLOCK|FUNCTION)\b/.test(text) && /\bEND_/.test(text);
}

export function transcript(state: UiSessionState): string {
  const lines: string[] = [];
  for (const message of state.messages) {
    const who = message.role === "user" ? "You" : `Assistant [${message.modelLabel}]`;
    lines.push(`${who}:`);
    lines.push(message.text);
    if (message.report) {
      lines.push(`-- compile: ${message.report.status} (attempt ${message.report.attempt})`);
      for (const diagnostic of message.report.diagnostics) {
        lines.push(`   ${diagnostic.code} ${diagnostic.category}: ${diagnostic.message}`);
      }
    }
    lines.push("");
  }
  return lines.join("\n");
}

export function statusLabel(status: FinalStatus | null, compileEnabled: boolean): string {
  if (!compileEnabled) return "draft (not compiled)";
  if (status === null) return "not compiled";
  if (status.kind === "compiled_clean") return "compiled clean";
  if (status.kind === "compiled_after_repair") {
    return `compiled after ${status.repairs} repair(s)`;
  }
  return `failed (${status.reason ?? "unknown"})`;
}
