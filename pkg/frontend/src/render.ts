/**
 * Pure HTML renderers. Everything returns a string so rendering is
 * deterministic and testable without a DOM; main.ts swaps the strings into
 * the page and wires events.
 */

import { filterTable, isEmptySpec } from "./filters.js";
import type { ComparisonTable, TimelineDoc } from "./types.js";
import { stateToFilterSpec, type ViewState } from "./urlState.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function cellText(values: { text: string }[]): string {
  return values.map((v) => v.text).join("; ");
}

export function applyState(table: ComparisonTable, state: ViewState): ComparisonTable {
  const spec = stateToFilterSpec(state);
  return isEmptySpec(spec) ? table : filterTable(table, spec);
}

export function renderTable(table: ComparisonTable, state: ViewState): string {
  const filtered = applyState(table, state);
  const selected = new Set(state.selection);
  const head = filtered.columns
    .map((c) => {
      const cls = selected.has(c.iri) ? ' class="selected"' : "";
      const year = c.year === null ? "" : ` <span class="year">(${c.year})</span>`;
      return `<th${cls} data-iri="${escapeHtml(c.iri)}">${escapeHtml(c.label)}${year}</th>`;
    })
    .join("");
  const body = filtered.rows
    .map((row) => {
      const cells = row.cells
        .map((cell, i) => {
          const cls = selected.has(filtered.columns[i]?.iri ?? "") ? ' class="selected"' : "";
          return `<td${cls}>${escapeHtml(cellText(cell))}</td>`;
        })
        .join("");
      return `<tr><th data-property="${escapeHtml(row.property)}">${escapeHtml(row.label)}</th>${cells}</tr>`;
    })
    .join("\n");
  const warnings = filtered.warnings.length
    ? `<ul class="warnings">${filtered.warnings
        .map((w) => `<li>${escapeHtml(w)}</li>`)
        .join("")}</ul>`
    : "";
  const provenance = filtered.persistent_id
    ? `<p class="provenance">Published as ${escapeHtml(filtered.persistent_id)}</p>`
    : "";
  return (
    `<h2>${escapeHtml(filtered.label)}</h2>${provenance}${warnings}` +
    `<table class="comparison"><thead><tr><th>property</th>${head}</tr></thead>` +
    `<tbody>\n${body}\n</tbody></table>`
  );
}

export function renderTimeline(
  table: ComparisonTable,
  state: ViewState,
  timeline: TimelineDoc,
): string {
  const filtered = applyState(table, state);
  const visible = new Set(filtered.columns.map((c) => c.iri));
  const labels = new Map(table.columns.map((c) => [c.iri, c.label]));
  const items = timeline.timeline
    .map((bucket) => {
      const members = bucket.contributions.filter((iri) => visible.has(iri));
      if (members.length === 0) {
        return "";
      }
      const names = members.map((iri) => escapeHtml(labels.get(iri) ?? iri)).join(", ");
      return `<li><strong>${escapeHtml(String(bucket.year))}</strong>: ${names}</li>`;
    })
    .filter((item) => item !== "")
    .join("\n");
  return `<h2>${escapeHtml(filtered.label)} — timeline</h2><ol class="timeline">\n${items}\n</ol>`;
}

export function renderEmptyState(comparison: string): string {
  return (
    `<div class="empty-state"><p>Comparison ${escapeHtml(comparison)} was not found.</p>` +
    `<button id="retry">Retry</button></div>`
  );
}

export function renderView(
  table: ComparisonTable | null,
  state: ViewState,
  timeline: TimelineDoc | null,
): string {
  if (table === null) {
    return renderEmptyState(state.comparison);
  }
  if (state.timeline && timeline !== null) {
    return renderTimeline(table, state, timeline);
  }
  return renderTable(table, state);
}
