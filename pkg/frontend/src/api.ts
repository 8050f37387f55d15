/** Typed client for the scheduling service API. All state the UI shows
 * originates from these responses; nothing is computed client-side. */

export interface CourseCard {
  code: string;
  title: string;
  credits: number;
}

export interface ScheduleDoc {
  semesters: CourseCard[][];
}

export interface SessionResponse {
  session_id: string;
  schedule?: ScheduleDoc;
  status?: string;
}

export interface ParsedItem {
  course: string;
  semester: number | string;
  condition: string;
}

export interface QueryResponse {
  restatement: string;
  query_token: string;
  parsed: {
    items: ParsedItem[];
    source: string;
    complexity: number;
    llm_fallback: boolean;
  };
}

export interface QueryErrorPayload {
  error: string;
  message: string;
  candidates?: { code: string; score: number }[];
}

export interface ExplanationPayload {
  kind: "explanation";
  text: string;
  mode: string;
  constraint_ids: string[];
  clause_labels: string[];
  categories: string[];
  minimal: boolean;
}

export interface AlternativePayload {
  kind: "alternative_schedule";
  schedule: ScheduleDoc;
}

export type ConfirmResponse =
  | ExplanationPayload
  | AlternativePayload
  | { status: "discarded" };

export interface HistoryEvent {
  ts: number;
  kind: string;
  payload: Record<string, unknown>;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public payload: QueryErrorPayload,
  ) {
    super(payload.message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, init);
  const body = await resp.json().catch(() => ({}));
  if (!resp.ok) {
    const payload: QueryErrorPayload =
      typeof body === "object" && body !== null && "error" in body
        ? (body as QueryErrorPayload)
        : { error: "http_error", message: `HTTP ${resp.status}` };
    throw new ApiError(resp.status, payload);
  }
  return body as T;
}

export class Api {
  constructor(private base = "") {}

  createSession(): Promise<SessionResponse> {
    return request(`${this.base}/api/session`, { method: "POST" });
  }

  nextSchedule(sid: string): Promise<{ schedule?: ScheduleDoc; status?: string }> {
    return request(`${this.base}/api/session/${sid}/schedules/next`, {
      method: "POST",
    });
  }

  submitQuery(sid: string, text: string): Promise<QueryResponse> {
    return request(`${this.base}/api/session/${sid}/query`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text }),
    });
  }

  confirm(sid: string, token: string, confirmed: boolean): Promise<ConfirmResponse> {
    return request(`${this.base}/api/session/${sid}/query/${token}/confirm`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ confirmed }),
    });
  }

  adoptAlternative(sid: string): Promise<{ schedule: ScheduleDoc }> {
    return request(`${this.base}/api/session/${sid}/alternative/adopt`, {
      method: "POST",
    });
  }

  history(sid: string): Promise<{ events: HistoryEvent[] }> {
    return request(`${this.base}/api/session/${sid}/history`);
  }
}
