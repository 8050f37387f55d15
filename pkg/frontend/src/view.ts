/** DOM rendering. The whole app re-renders from the store on each change;
 * explanation text lands in the DOM via textContent, byte for byte. */

import type { CourseCard, ScheduleDoc } from "./api.js";
import type { ViewState } from "./store.js";

export interface Handlers {
  onSubmitQuery(text: string): void;
  onConfirm(): void;
  onReject(): void;
  onNextSchedule(): void;
  onAdoptAlternative(): void;
  onDismissAlternative(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function creditTotal(column: CourseCard[]): number {
  return column.reduce((sum, c) => sum + c.credits, 0);
}

function placementSet(doc: ScheduleDoc): Set<string> {
  const out = new Set<string>();
  doc.semesters.forEach((column, s) => {
    for (const card of column) out.add(`${card.code}@${s}`);
  });
  return out;
}

export function renderScheduleGrid(
  doc: ScheduleDoc,
  options: { highlightAgainst?: ScheduleDoc; testid?: string } = {},
): HTMLElement {
  const grid = el("div", "schedule-grid");
  grid.dataset.testid = options.testid ?? "schedule-grid";
  const baseline = options.highlightAgainst
    ? placementSet(options.highlightAgainst)
    : null;
  doc.semesters.forEach((column, s) => {
    const col = el("div", "semester-column");
    col.appendChild(el("h3", "semester-title", `Semester ${s + 1}`));
    col.appendChild(
      el("div", "semester-credits", `${creditTotal(column)} credits`),
    );
    if (column.length === 0) {
      col.appendChild(el("div", "no-courses", "no courses"));
    }
    for (const card of column) {
      const changed = baseline !== null && !baseline.has(`${card.code}@${s}`);
      const node = el("div", changed ? "course-card changed" : "course-card");
      node.appendChild(el("div", "course-code", card.code));
      node.appendChild(el("div", "course-title", card.title));
      node.appendChild(el("div", "course-credits", `${card.credits} cr`));
      col.appendChild(node);
    }
    grid.appendChild(col);
  });
  return grid;
}

function renderBanner(state: ViewState): HTMLElement | null {
  if (!state.banner) return null;
  const banner = el("div", "banner error");
  banner.dataset.testid = "error-banner";
  banner.appendChild(el("span", "banner-message", state.banner.message));
  if (state.banner.candidates) {
    const chips = el("div", "candidate-chips");
    for (const code of state.banner.candidates) {
      const chip = el("button", "chip", code);
      chip.type = "button";
      chip.dataset.candidate = code;
      chips.appendChild(chip);
    }
    banner.appendChild(chips);
  }
  return banner;
}

function renderDialog(state: ViewState, handlers: Handlers): HTMLElement | null {
  if (!state.pending) return null;
  const overlay = el("div", "dialog-overlay");
  overlay.dataset.testid = "verification-dialog";
  const box = el("div", "dialog-box");
  box.appendChild(el("h3", undefined, "Please verify your question"));
  const restatement = el("p", "restatement", state.pending.restatement);
  restatement.dataset.testid = "restatement";
  box.appendChild(restatement);
  const buttons = el("div", "dialog-buttons");
  const confirm = el("button", "primary", "Confirm");
  confirm.dataset.testid = "confirm-button";
  confirm.addEventListener("click", () => handlers.onConfirm());
  const reject = el("button", undefined, "That is not what I asked");
  reject.dataset.testid = "reject-button";
  reject.addEventListener("click", () => handlers.onReject());
  buttons.appendChild(reject);
  buttons.appendChild(confirm);
  box.appendChild(buttons);
  overlay.appendChild(box);
  return overlay;
}

function renderTimeline(state: ViewState): HTMLElement {
  const timeline = el("div", "timeline");
  timeline.dataset.testid = "timeline";
  for (const entry of state.timeline) {
    const item = el("div", `timeline-entry ${entry.role}`);
    if (entry.role === "explanation") {
      item.dataset.testid = "explanation-card";
      const text = el("p", "explanation-text", entry.text);
      text.dataset.testid = "explanation-text";
      item.appendChild(text);
      if (entry.sources && entry.sources.length) {
        item.appendChild(
          el("div", "explanation-sources", entry.sources.join(" ")),
        );
      }
    } else {
      item.textContent = entry.text;
    }
    timeline.appendChild(item);
  }
  return timeline;
}

function renderAlternative(state: ViewState, handlers: Handlers): HTMLElement | null {
  if (!state.alternative || !state.schedule) return null;
  const panel = el("div", "alternative-panel");
  panel.dataset.testid = "alternative-panel";
  panel.appendChild(el("h3", undefined, "Alternative schedule"));
  const pair = el("div", "schedule-pair");
  const left = el("div", "pair-side");
  left.appendChild(el("h4", undefined, "Current"));
  left.appendChild(renderScheduleGrid(state.schedule, { testid: "current-grid" }));
  const right = el("div", "pair-side");
  right.appendChild(el("h4", undefined, "Proposed"));
  right.appendChild(
    renderScheduleGrid(state.alternative, {
      highlightAgainst: state.schedule,
      testid: "alternative-grid",
    }),
  );
  pair.appendChild(left);
  pair.appendChild(right);
  panel.appendChild(pair);
  const adopt = el("button", "primary", "Adopt this schedule");
  adopt.dataset.testid = "adopt-button";
  adopt.addEventListener("click", () => handlers.onAdoptAlternative());
  const dismiss = el("button", undefined, "Keep current");
  dismiss.dataset.testid = "dismiss-button";
  dismiss.addEventListener("click", () => handlers.onDismissAlternative());
  const buttons = el("div", "dialog-buttons");
  buttons.appendChild(dismiss);
  buttons.appendChild(adopt);
  panel.appendChild(buttons);
  return panel;
}

export function renderApp(root: HTMLElement, state: ViewState, handlers: Handlers): void {
  root.textContent = "";
  const header = el("header");
  header.appendChild(el("h1", undefined, "whysched"));
  header.appendChild(
    el("p", "subtitle", "Ask why your schedule looks the way it does."),
  );
  root.appendChild(header);

  const banner = renderBanner(state);
  if (banner) root.appendChild(banner);

  if (state.infeasible) {
    const notice = el("div", "banner error", "No schedule satisfies the catalog requirements.");
    notice.dataset.testid = "infeasible-notice";
    root.appendChild(notice);
  } else if (state.schedule && !state.alternative) {
    root.appendChild(renderScheduleGrid(state.schedule));
    const next = el("button", undefined, "Show a different schedule");
    next.dataset.testid = "next-schedule-button";
    next.disabled = state.busy || state.exhausted;
    next.addEventListener("click", () => handlers.onNextSchedule());
    root.appendChild(next);
  }

  const alternative = renderAlternative(state, handlers);
  if (alternative) root.appendChild(alternative);

  const form = el("form", "query-form");
  const input = el("input") as HTMLInputElement;
  input.type = "text";
  input.placeholder = 'e.g. "Why not XOX R89 in semester 5?"';
  input.dataset.testid = "query-input";
  input.disabled = state.busy || state.infeasible || state.pending !== null;
  const submit = el("button", "primary", "Ask");
  submit.type = "submit";
  submit.dataset.testid = "query-submit";
  submit.disabled = input.disabled;
  form.appendChild(input);
  form.appendChild(submit);
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const text = input.value.trim();
    if (text) handlers.onSubmitQuery(text);
  });
  root.appendChild(form);

  root.appendChild(renderTimeline(state));

  const dialog = renderDialog(state, handlers);
  if (dialog) root.appendChild(dialog);
}
