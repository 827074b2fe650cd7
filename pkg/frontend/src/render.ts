// DOM rendering: chat history, per-model answer panels with compile results,
// and span-highlighted code views.  Full re-render per state change; the
// app is small enough that diffing would be overhead.

import type { CompileReport, Diagnostic } from "./types.js";
import { PanelState, UiSessionState, statusLabel } from "./state.js";

export interface UiHandlers {
  onSelectModel(label: string): void;
}

export function renderApp(root: HTMLElement, state: UiSessionState, handlers: UiHandlers): void {
  const history = root.querySelector("#history") as HTMLElement;
  const panels = root.querySelector("#panels") as HTMLElement;
  const banner = root.querySelector("#banner") as HTMLElement;

  renderBanner(banner, state);
  renderHistory(history, state);
  renderPanels(panels, state, handlers);
}

function renderBanner(banner: HTMLElement, state: UiSessionState): void {
  banner.textContent = "";
  banner.className = "banner";
  if (state.error) {
    banner.classList.add("banner-error");
    banner.textContent = state.error;
  } else if (state.notice) {
    banner.classList.add("banner-notice");
    banner.textContent = state.notice;
  }
}

function renderHistory(history: HTMLElement, state: UiSessionState): void {
  history.textContent = "";
  for (const message of state.messages) {
    if (message.role !== "user") continue;
    const bubble = document.createElement("div");
    bubble.className = "user-message";
    bubble.textContent = message.text;
    history.appendChild(bubble);
  }
}

function renderPanels(container: HTMLElement, state: UiSessionState, handlers: UiHandlers): void {
  container.textContent = "";
  for (const label of state.panelOrder) {
    const panel = state.panels.get(label);
    if (panel) container.appendChild(renderPanel(panel, state, handlers));
  }
}

function renderPanel(panel: PanelState, state: UiSessionState, handlers: UiHandlers): HTMLElement {
  const article = document.createElement("article");
  article.className = "path-panel";
  article.dataset.label = panel.label;

  const header = document.createElement("header");
  const title = document.createElement("strong");
  title.textContent = panel.label;
  header.appendChild(title);

  const status = document.createElement("span");
  status.className = "status";
  status.textContent = panel.done
    ? statusLabel(panel.finalStatus, state.settings.compile_enabled && !state.settings.draft_mode)
    : "generating…";
  if (panel.finalStatus?.kind === "failed") status.classList.add("status-failed");
  header.appendChild(status);

  if (panel.done) {
    const select = document.createElement("button");
    select.className = "select-model";
    select.textContent = state.selectedModel === panel.label ? "selected" : "use this model";
    select.disabled = state.selectedModel === panel.label;
    select.addEventListener("click", () => handlers.onSelectModel(panel.label));
    header.appendChild(select);
  }
  article.appendChild(header);

  if (!panel.done && panel.streamText) {
    const stream = document.createElement("pre");
    stream.className = "stream-text";
    stream.textContent = panel.streamText;
    article.appendChild(stream);
  }

  if (panel.code) {
    article.appendChild(renderCodeView(panel.code, lastErrorDiagnostics(panel)));
  }
  if (panel.explanation) {
    const explanation = document.createElement("p");
    explanation.className = "explanation";
    explanation.textContent = panel.explanation;
    article.appendChild(explanation);
  }
  for (const warning of panel.warnings) {
    const note = document.createElement("p");
    note.className = "warning";
    note.textContent = warning;
    article.appendChild(note);
  }

  // Draft mode hides compile panels entirely.
  if (!state.settings.draft_mode && state.settings.compile_enabled) {
    for (const report of panel.reports) {
      article.appendChild(renderCompilePanel(report));
    }
  }
  return article;
}

function lastErrorDiagnostics(panel: PanelState): Diagnostic[] {
  const last = panel.reports[panel.reports.length - 1];
  return last ? last.diagnostics : [];
}

export function renderCodeView(code: string, diagnostics: Diagnostic[]): HTMLElement {
  const pre = document.createElement("pre");
  pre.className = "code-view";
  const lines = code.replace(/\n$/, "").split("\n");
  lines.forEach((text, index) => {
    const lineNo = index + 1;
    const row = document.createElement("span");
    row.className = "code-line";
    row.dataset.line = String(lineNo);
    const hits = diagnostics.filter(
      (d) => d.span.start_line <= lineNo && lineNo <= d.span.end_line,
    );
    if (hits.length > 0) {
      row.classList.add("diag-line");
      row.title = hits.map((d) => `${d.code}: ${d.message}`).join("\n");
    }
    row.textContent = text + "\n";
    pre.appendChild(row);
  });
  return pre;
}

export function renderCompilePanel(report: CompileReport): HTMLElement {
  const section = document.createElement("section");
  section.className = "compile-panel";
  section.dataset.status = report.status;

  const heading = document.createElement("div");
  heading.className = "compile-heading";
  heading.textContent =
    `attempt ${report.attempt}: ${report.status} ` +
    `(${report.diagnostics.length} diagnostic(s), ${report.elapsed_ms.toFixed(1)} ms)`;
  section.appendChild(heading);

  if (report.diagnostics.length > 0) {
    const list = document.createElement("ul");
    list.className = "diagnostics";
    for (const diagnostic of report.diagnostics) {
      const item = document.createElement("li");
      item.className = diagnostic.severity === "Error" ? "diag-error" : "diag-warning";
      const where = `${diagnostic.span.start_line}:${diagnostic.span.start_col}`;
      item.textContent = `${diagnostic.code} ${diagnostic.category} at ${where}: ${diagnostic.message}`;
      list.appendChild(item);
    }
    section.appendChild(list);
  }
  return section;
}
