/**
 * View state <-> URL query string.
 *
 * Every knob of the explorer (comparison id, hidden properties, filter
 * clauses, year range, timeline toggle, selected columns) lives in the URL,
 * so a deep link reproduces the exact rendered state.
 */

import type { ComparatorOp, FilterSpec, RequireClause } from "./types.js";

export interface ViewState {
  comparison: string;
  hidden: string[];
  clauses: RequireClause[];
  years: [number, number] | null;
  timeline: boolean;
  selection: string[];
}

export const DEFAULT_COMPARISON = "R280270";

export function defaultState(comparison: string = DEFAULT_COMPARISON): ViewState {
  return {
    comparison,
    hidden: [],
    clauses: [],
    years: null,
    timeline: false,
    selection: [],
  };
}

// longest operators first so "F1>=0.7" never splits at ">"
const OPS: ComparatorOp[] = [">=", "<=", ">", "<", "="];

export function formatClause(clause: RequireClause): string {
  return `${clause.property}${clause.op}${clause.value}`;
}

export function parseClause(raw: string): RequireClause | null {
  for (const op of OPS) {
    const at = raw.indexOf(op);
    if (at > 0) {
      return {
        property: raw.slice(0, at),
        op,
        value: raw.slice(at + op.length),
      };
    }
  }
  return null;
}

export function stateToQuery(state: ViewState): string {
  const params = new URLSearchParams();
  params.set("comparison", state.comparison);
  for (const hidden of state.hidden) {
    params.append("hide", hidden);
  }
  for (const clause of state.clauses) {
    params.append("clause", formatClause(clause));
  }
  if (state.years !== null) {
    params.set("years", `${state.years[0]}-${state.years[1]}`);
  }
  if (state.timeline) {
    params.set("timeline", "1");
  }
  for (const iri of state.selection) {
    params.append("sel", iri);
  }
  return params.toString();
}

export function stateFromQuery(query: string): ViewState {
  const params = new URLSearchParams(query);
  const state = defaultState(params.get("comparison") ?? DEFAULT_COMPARISON);
  state.hidden = params.getAll("hide");
  state.clauses = params
    .getAll("clause")
    .map(parseClause)
    .filter((c): c is RequireClause => c !== null);
  const years = params.get("years");
  if (years !== null) {
    const m = /^(\d+)-(\d+)$/.exec(years);
    if (m) {
      state.years = [Number(m[1]), Number(m[2])];
    }
  }
  state.timeline = params.get("timeline") === "1";
  state.selection = params.getAll("sel");
  return state;
}

/** The filter spec this state asks the (client or server) filter to apply. */
export function stateToFilterSpec(state: ViewState): FilterSpec {
  return {
    hide_properties: state.hidden,
    require: state.clauses,
    year_range: state.years,
  };
}
