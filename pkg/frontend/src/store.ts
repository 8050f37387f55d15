/** Single view-state store. Every transition takes an API response; the UI
 * never fabricates schedules, foils, or explanation text. At most one
 * verification can be pending at a time. */

import type {
  ConfirmResponse,
  QueryErrorPayload,
  QueryResponse,
  ScheduleDoc,
  SessionResponse,
} from "./api.js";

export interface TimelineEntry {
  role: "user" | "restatement" | "explanation" | "info";
  text: string;
  sources?: string[];
}

export interface PendingVerification {
  token: string;
  restatement: string;
  queryText: string;
}

export interface Banner {
  message: string;
  candidates?: string[];
}

export interface ViewState {
  sessionId: string | null;
  schedule: ScheduleDoc | null;
  infeasible: boolean;
  pending: PendingVerification | null;
  alternative: ScheduleDoc | null;
  timeline: TimelineEntry[];
  banner: Banner | null;
  busy: boolean;
  exhausted: boolean;
}

export function initialState(): ViewState {
  return {
    sessionId: null,
    schedule: null,
    infeasible: false,
    pending: null,
    alternative: null,
    timeline: [],
    banner: null,
    busy: false,
    exhausted: false,
  };
}

export function applySession(state: ViewState, resp: SessionResponse): ViewState {
  if (resp.status === "infeasible" || !resp.schedule) {
    return {
      ...state,
      sessionId: resp.session_id,
      schedule: null,
      infeasible: true,
      banner: null,
    };
  }
  return {
    ...state,
    sessionId: resp.session_id,
    schedule: resp.schedule,
    infeasible: false,
    banner: null,
  };
}

export function applyQueryResponse(
  state: ViewState,
  queryText: string,
  resp: QueryResponse,
): ViewState {
  if (state.pending) {
    throw new Error("a verification is already pending");
  }
  return {
    ...state,
    banner: null,
    pending: {
      token: resp.query_token,
      restatement: resp.restatement,
      queryText,
    },
    timeline: [...state.timeline, { role: "user", text: queryText }],
  };
}

export function applyQueryError(state: ViewState, payload: QueryErrorPayload): ViewState {
  return {
    ...state,
    banner: {
      message: payload.message,
      candidates: payload.candidates?.map((c) => c.code),
    },
  };
}

export function applyReject(state: ViewState): ViewState {
  return {
    ...state,
    pending: null,
    timeline: [
      ...state.timeline,
      { role: "info", text: "Query discarded; please rephrase." },
    ],
  };
}

export function applyConfirmResult(state: ViewState, resp: ConfirmResponse): ViewState {
  const restated = state.pending
    ? [{ role: "restatement", text: state.pending.restatement } as TimelineEntry]
    : [];
  if ("kind" in resp && resp.kind === "explanation") {
    return {
      ...state,
      pending: null,
      timeline: [
        ...state.timeline,
        ...restated,
        { role: "explanation", text: resp.text, sources: resp.constraint_ids },
      ],
    };
  }
  if ("kind" in resp && resp.kind === "alternative_schedule") {
    return {
      ...state,
      pending: null,
      alternative: resp.schedule,
      timeline: [
        ...state.timeline,
        ...restated,
        { role: "info", text: "That is possible: an alternative schedule satisfies it." },
      ],
    };
  }
  return applyReject(state);
}

export function applyNextSchedule(
  state: ViewState,
  resp: { schedule?: ScheduleDoc; status?: string },
): ViewState {
  if (resp.status === "exhausted" || !resp.schedule) {
    return {
      ...state,
      exhausted: true,
      timeline: [
        ...state.timeline,
        { role: "info", text: "No further distinct schedules exist." },
      ],
    };
  }
  return { ...state, schedule: resp.schedule, alternative: null };
}

export function applyAdopt(state: ViewState, resp: { schedule: ScheduleDoc }): ViewState {
  return {
    ...state,
    schedule: resp.schedule,
    alternative: null,
    timeline: [
      ...state.timeline,
      { role: "info", text: "Adopted the alternative schedule." },
    ],
  };
}

export function dismissAlternative(state: ViewState): ViewState {
  return { ...state, alternative: null };
}

export type Listener = (state: ViewState) => void;

export class Store {
  private state_: ViewState = initialState();
  private listeners: Listener[] = [];

  get state(): ViewState {
    return this.state_;
  }

  set(next: ViewState): void {
    this.state_ = next;
    for (const fn of this.listeners) {
      fn(next);
    }
  }

  patch(partial: Partial<ViewState>): void {
    this.set({ ...this.state_, ...partial });
  }

  subscribe(fn: Listener): void {
    this.listeners.push(fn);
  }
}
