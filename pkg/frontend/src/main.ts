/**
 * Browser entry point: reads the view state from the URL, loads the
 * comparison from the API, renders, and keeps state and URL in sync so every
 * view is deep-linkable.
 */

import { fetchComparison, fetchTimeline } from "./api.js";
import { knownClauseProperties } from "./filters.js";
import { renderView } from "./render.js";
import type { ComparisonTable, TimelineDoc } from "./types.js";
import {
  defaultState,
  parseClause,
  stateFromQuery,
  stateToQuery,
  type ViewState,
} from "./urlState.js";

const API_BASE = (window as { ODK_API_BASE?: string }).ODK_API_BASE ?? "";

let state: ViewState = stateFromQuery(window.location.search);
let table: ComparisonTable | null = null;
let timeline: TimelineDoc | null = null;

function pushState(): void {
  const query = stateToQuery(state);
  window.history.pushState(null, "", `${window.location.pathname}?${query}`);
}

function app(): HTMLElement {
  const el = document.getElementById("app");
  if (el === null) {
    throw new Error("missing #app container");
  }
  return el;
}

function render(): void {
  app().innerHTML = renderView(table, state, timeline);
  const retry = document.getElementById("retry");
  if (retry !== null) {
    retry.addEventListener("click", () => void load());
  }
  for (const th of app().querySelectorAll<HTMLElement>("th[data-iri]")) {
    th.addEventListener("click", () => {
      const iri = th.dataset.iri ?? "";
      state.selection = state.selection.includes(iri)
        ? state.selection.filter((s) => s !== iri)
        : [...state.selection, iri];
      pushState();
      render();
    });
  }
}

async function load(): Promise<void> {
  table = await fetchComparison(API_BASE, state.comparison);
  timeline = table === null ? null : await fetchTimeline(API_BASE, state.comparison);
  render();
}

function bindControls(): void {
  const clauseInput = document.getElementById("clause") as HTMLInputElement | null;
  const addClause = document.getElementById("add-clause");
  addClause?.addEventListener("click", () => {
    const clause = parseClause(clauseInput?.value ?? "");
    // clauses must reference something the loaded table actually carries
    if (clause !== null && table !== null && knownClauseProperties(table).has(clause.property)) {
      state.clauses = [...state.clauses, clause];
      pushState();
      render();
    }
  });
  const hideInput = document.getElementById("hide") as HTMLInputElement | null;
  document.getElementById("add-hide")?.addEventListener("click", () => {
    const name = hideInput?.value ?? "";
    if (name !== "") {
      state.hidden = [...state.hidden, name];
      pushState();
      render();
    }
  });
  const yearsInput = document.getElementById("years") as HTMLInputElement | null;
  document.getElementById("set-years")?.addEventListener("click", () => {
    const m = /^(\d+)-(\d+)$/.exec(yearsInput?.value ?? "");
    state.years = m ? [Number(m[1]), Number(m[2])] : null;
    pushState();
    render();
  });
  document.getElementById("toggle-timeline")?.addEventListener("click", () => {
    state.timeline = !state.timeline;
    pushState();
    render();
  });
  document.getElementById("clear")?.addEventListener("click", () => {
    state = defaultState(state.comparison);
    pushState();
    render();
  });
}

window.addEventListener("popstate", () => {
  state = stateFromQuery(window.location.search);
  render();
});

bindControls();
void load();
