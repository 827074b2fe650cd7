// Wire types mirroring the service JSON schema (schema_version 1).

export interface SourceSpan {
  start_line: number;
  start_col: number;
  end_line: number;
  end_col: number;
}

export interface Diagnostic {
  code: string;
  category: string;
  severity: "Error" | "Warning";
  span: SourceSpan;
  message: string;
}

export interface CompileReport {
  status: "Success" | "Failed" | "Timeout";
  diagnostics: Diagnostic[];
  attempt: number;
  elapsed_ms: number;
  compiler_id: string;
}

export interface FinalStatus {
  kind: "compiled_clean" | "compiled_after_repair" | "failed";
  repairs: number;
  reason: string | null;
}

export interface PathRecord {
  config_label: string;
  code: string | null;
  explanation: string | null;
  final_status: FinalStatus | null;
  reports: CompileReport[];
  warnings: string[];
}

export interface SessionSettings {
  expansion: boolean;
  draft_mode: boolean;
  compile_enabled: boolean;
}

export interface SessionTurn {
  role: "user" | "assistant";
  text: string;
  model_label: string | null;
  compile_report: CompileReport | null;
  timestamp: number;
  liked: boolean;
}

export interface SessionData {
  id: string;
  selected_model: string | null;
  settings: SessionSettings;
  turns: SessionTurn[];
}

export interface UploadResult {
  filename: string;
  chunks_indexed: number;
  doc_ids: string[];
}

export interface HealthInfo {
  status: string;
  profile_id: string;
  segments: Record<string, number>;
  models: string[];
}

export type StreamEventName = "delta" | "compile" | "path_done" | "done" | "error";

export interface StreamEvent {
  event: StreamEventName;
  data: Record<string, unknown>;
}
