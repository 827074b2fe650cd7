// App wiring: composer, toggles, upload, download, stream lifecycle.

import { ApiError, StforgeClient } from "./api.js";
import { renderApp } from "./render.js";
import {
  applyEvent, beginTurn, fromSession, initialState, transcript, UiSessionState,
} from "./state.js";

export function mountApp(root: HTMLElement, client: StforgeClient): AppController {
  const controller = new AppController(root, client);
  controller.init();
  return controller;
}

export class AppController {
  state: UiSessionState = initialState();

  constructor(private root: HTMLElement, private client: StforgeClient) {}

  init(): void {
    this.bindControls();
    const sessionId = window.location.hash.replace(/^#/, "");
    if (sessionId) {
      void this.restore(sessionId);
    }
    this.paint();
  }

  private element<T extends HTMLElement>(selector: string): T {
    const node = this.root.querySelector(selector);
    if (!node) throw new Error(`missing element ${selector}`);
    return node as T;
  }

  private bindControls(): void {
    this.element<HTMLFormElement>("#composer").addEventListener("submit", (event) => {
      event.preventDefault();
      void this.send();
    });
    this.element<HTMLInputElement>("#upload-input").addEventListener("change", (event) => {
      const input = event.target as HTMLInputElement;
      const file = input.files?.[0];
      if (file) void this.upload(file);
      input.value = "";
    });
    this.element<HTMLButtonElement>("#download-btn").addEventListener("click", () => {
      this.download();
    });
    for (const name of ["expansion", "draft_mode", "compile_enabled"] as const) {
      this.element<HTMLInputElement>(`#toggle-${name.replace("_", "-")}`)
        .addEventListener("change", (event) => {
          this.state.settings[name] = (event.target as HTMLInputElement).checked;
        });
    }
  }

  async restore(sessionId: string): Promise<void> {
    try {
      const data = await this.client.fetchSession(sessionId);
      this.state = fromSession(data);
      this.paint();
    } catch (error) {
      this.state.error = error instanceof Error ? error.message : String(error);
      this.paint();
    }
  }

  async send(): Promise<void> {
    const input = this.element<HTMLTextAreaElement>("#message-input");
    const text = input.value.trim();
    if (!text || this.state.streaming) return;

    // Follow-ups need a selected model; the first message fans out to all.
    const isFollowup = this.state.messages.length > 0;
    if (isFollowup && !this.state.selectedModel) {
      this.state.error = "Pick a model ('use this model') before sending a follow-up.";
      this.paint();
      return;
    }

    try {
      if (!this.state.sessionId) {
        const session = await this.client.createSession(this.state.settings);
        this.state.sessionId = session.id;
        window.location.hash = session.id;
      }
      beginTurn(this.state, text);
      input.value = "";
      this.paint();
      await this.client.streamMessage(
        this.state.sessionId,
        text,
        (event) => {
          applyEvent(this.state, event);
          this.paint();
        },
        isFollowup ? this.state.selectedModel ?? undefined : undefined,
      );
    } catch (error) {
      // Keep the message in the composer so nothing is lost.
      input.value = text;
      this.state.streaming = false;
      this.state.error = error instanceof Error ? error.message : String(error);
    }
    this.paint();
  }

  async upload(file: File): Promise<void> {
    try {
      const data = await file.arrayBuffer();
      const result = await this.client.uploadFile(file.name, data);
      this.state.notice = `${result.filename}: ${result.chunks_indexed} chunk(s) indexed`;
      this.state.error = null;
    } catch (error) {
      this.state.error = error instanceof ApiError
        ? `${error.code ?? "UploadRejected"}: ${error.message}`
        : String(error);
    }
    this.paint();
  }

  download(): void {
    const blob = new Blob([transcript(this.state)], { type: "text/plain" });
    const url = URL.createObjectURL(blob);
    const anchor = document.createElement("a");
    anchor.href = url;
    anchor.download = `chat-${this.state.sessionId ?? "session"}.txt`;
    anchor.click();
    URL.revokeObjectURL(url);
  }

  selectModel(label: string): void {
    this.state.selectedModel = label;
    this.paint();
  }

  paint(): void {
    renderApp(this.root, this.state, {
      onSelectModel: (label) => this.selectModel(label),
    });
    const sessionBadge = this.root.querySelector("#session-id");
    if (sessionBadge) sessionBadge.textContent = this.state.sessionId ?? "new session";
  }
}

declare global {
  interface Window {
    stforgeApp?: AppController;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  window.stforgeApp = mountApp(
    document.getElementById("app") as HTMLElement,
    new StforgeClient(""),
  );
}
