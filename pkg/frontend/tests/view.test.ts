import { beforeEach, describe, expect, it, vi } from "vitest";

import type { ScheduleDoc } from "../src/api.js";
import { applyQueryResponse, applySession, initialState } from "../src/store.js";
import { renderApp, renderScheduleGrid, type Handlers } from "../src/view.js";

const schedule: ScheduleDoc = {
  semesters: [
    [
      { code: "AAA A01", title: "Alpha", credits: 3 },
      { code: "BBB B02", title: "Beta", credits: 4 },
    ],
    [],
  ],
};

function handlers(): Handlers {
  return {
    onSubmitQuery: vi.fn(),
    onConfirm: vi.fn(),
    onReject: vi.fn(),
    onNextSchedule: vi.fn(),
    onAdoptAlternative: vi.fn(),
    onDismissAlternative: vi.fn(),
  };
}

let root: HTMLElement;
beforeEach(() => {
  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById("app") as HTMLElement;
});

describe("schedule grid", () => {
  it("renders one column per semester with credit totals", () => {
    const grid = renderScheduleGrid(schedule);
    const columns = grid.querySelectorAll(".semester-column");
    expect(columns).toHaveLength(2);
    expect(columns[0]?.querySelector(".semester-credits")?.textContent)
      .toBe("7 credits");
    expect(columns[0]?.querySelector(".semester-title")?.textContent)
      .toBe("Semester 1");
  });

  it("renders empty semesters with a no-courses marker", () => {
    const grid = renderScheduleGrid(schedule);
    const second = grid.querySelectorAll(".semester-column")[1];
    expect(second?.querySelector(".no-courses")?.textContent).toBe("no courses");
  });

  it("highlights placements missing from the baseline", () => {
    const alt: ScheduleDoc = {
      semesters: [
        [{ code: "AAA A01", title: "Alpha", credits: 3 }],
        [{ code: "BBB B02", title: "Beta", credits: 4 }],
      ],
    };
    const grid = renderScheduleGrid(alt, { highlightAgainst: schedule });
    const changed = grid.querySelectorAll(".course-card.changed");
    expect(changed).toHaveLength(1);
    expect(changed[0]?.querySelector(".course-code")?.textContent).toBe("BBB B02");
  });
});

describe("app shell", () => {
  it("infeasible state shows the notice and disables input", () => {
    const state = applySession(initialState(), {
      session_id: "s1", status: "infeasible",
    });
    renderApp(root, state, handlers());
    expect(root.querySelector('[data-testid="infeasible-notice"]')).toBeTruthy();
    const input = root.querySelector('[data-testid="query-input"]') as HTMLInputElement;
    expect(input.disabled).toBe(true);
  });

  it("pending verification renders the dialog and locks the input", () => {
    let state = applySession(initialState(), { session_id: "s1", schedule });
    state = applyQueryResponse(state, "Why AAA A01?", {
      restatement: "You are asking why AAA A01 IS scheduled.",
      query_token: "t",
      parsed: { items: [], source: "grammar", complexity: 1, llm_fallback: false },
    });
    const h = handlers();
    renderApp(root, state, h);
    const dialog = root.querySelector('[data-testid="verification-dialog"]');
    expect(dialog).toBeTruthy();
    expect(dialog?.querySelector('[data-testid="restatement"]')?.textContent)
      .toBe("You are asking why AAA A01 IS scheduled.");
    const input = root.querySelector('[data-testid="query-input"]') as HTMLInputElement;
    expect(input.disabled).toBe(true);
    (dialog?.querySelector('[data-testid="confirm-button"]') as HTMLElement).click();
    expect(h.onConfirm).toHaveBeenCalledOnce();
  });

  it("explanation entries land in the DOM byte for byte", () => {
    const text = "AAA A01 cannot be scheduled because its prerequisite BBB B02 has not been completed.";
    const state = {
      ...applySession(initialState(), { session_id: "s1", schedule }),
      timeline: [{ role: "explanation" as const, text, sources: ["prereq/x"] }],
    };
    renderApp(root, state, handlers());
    const card = root.querySelector('[data-testid="explanation-text"]');
    expect(card?.textContent).toBe(text);
  });

  it("error banner lists candidate chips", () => {
    const state = {
      ...applySession(initialState(), { session_id: "s1", schedule }),
      banner: { message: "ambiguous", candidates: ["XOX R89", "WJW R89"] },
    };
    renderApp(root, state, handlers());
    const chips = root.querySelectorAll(".chip");
    expect([...chips].map((c) => c.textContent)).toEqual(["XOX R89", "WJW R89"]);
  });
});
