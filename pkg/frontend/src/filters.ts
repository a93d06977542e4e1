/**
 * Client-side comparison filtering.
 *
 * This mirrors the server's filter_table semantics exactly (same clause
 * matching, same short-circuit order, same warning strings), so the UI can
 * filter locally and still agree byte-for-byte with the API. The contract
 * test suite asserts that equivalence against server-generated fixtures.
 */

import type {
  CellValue,
  ComparatorOp,
  ComparisonRow,
  ComparisonTable,
  FilterSpec,
  RequireClause,
} from "./types.js";

const DECIMAL_RE = /^[+-]?\d+(\.\d+)?([eE][+-]?\d+)?$/;

/** Parse a decimal string the way the server does; null when not numeric. */
export function parseDecimal(raw: string | null): number | null {
  if (raw === null || !DECIMAL_RE.test(raw.trim())) {
    return null;
  }
  return Number(raw);
}

function rowMatches(row: ComparisonRow, name: string): boolean {
  return name === row.label || name === row.property || row.properties.includes(name);
}

function valueSatisfies(
  value: CellValue,
  clause: RequireClause,
  warnings: Set<string>,
): boolean {
  const target = parseDecimal(clause.value);
  const num = parseDecimal(value.number);
  if (clause.op === "=") {
    if (num !== null && target !== null) {
      return num === target;
    }
    return value.text === clause.value;
  }
  if (num === null || target === null) {
    warnings.add(`comparator ${clause.op} skipped a non-numeric value for '${clause.property}'`);
    return false;
  }
  switch (clause.op) {
    case ">":
      return num > target;
    case ">=":
      return num >= target;
    case "<":
      return num < target;
    case "<=":
      return num <= target;
  }
}

/** A clause names either a table row or a metric carried by cell values. */
function columnSatisfies(
  table: ComparisonTable,
  colIndex: number,
  clause: RequireClause,
  warnings: Set<string>,
): boolean {
  for (const row of table.rows) {
    const namedRow = rowMatches(row, clause.property);
    for (const value of row.cells[colIndex] ?? []) {
      if (namedRow && valueSatisfies(value, clause, warnings)) {
        return true;
      }
      if (value.metric === clause.property && valueSatisfies(value, clause, warnings)) {
        return true;
      }
    }
  }
  return false;
}

/**
 * Everything a require clause may legally name for this table: row labels,
 * row property IRIs (merged ones included), and the metrics carried by
 * compound cell values. The UI refuses clauses outside this set.
 */
export function knownClauseProperties(table: ComparisonTable): Set<string> {
  const known = new Set<string>();
  for (const row of table.rows) {
    known.add(row.label);
    known.add(row.property);
    for (const property of row.properties) {
      known.add(property);
    }
    for (const cell of row.cells) {
      for (const value of cell) {
        if (value.metric !== null) {
          known.add(value.metric);
        }
      }
    }
  }
  return known;
}

export function emptySpec(): FilterSpec {
  return { hide_properties: [], require: [], year_range: null };
}

export function isEmptySpec(spec: FilterSpec): boolean {
  return (
    spec.hide_properties.length === 0 && spec.require.length === 0 && spec.year_range === null
  );
}

export function filterTable(table: ComparisonTable, spec: FilterSpec): ComparisonTable {
  const warnings = new Set<string>();
  const keep: number[] = [];
  table.columns.forEach((column, i) => {
    let ok = spec.require.every((clause) => columnSatisfies(table, i, clause, warnings));
    if (ok && spec.year_range !== null) {
      const [lo, hi] = spec.year_range;
      ok = column.year !== null && lo <= column.year && column.year <= hi;
    }
    if (ok) {
      keep.push(i);
    }
  });

  const rows = table.rows
    .filter((row) => !spec.hide_properties.some((hidden) => rowMatches(row, hidden)))
    .map((row) => ({
      ...row,
      properties: [...row.properties],
      cells: keep.map((i) => row.cells[i] ?? []),
    }));

  return {
    id: table.id,
    label: table.label,
    columns: keep.map((i) => table.columns[i]!),
    rows,
    provenance: table.provenance,
    persistent_id: table.persistent_id,
    warnings: [...warnings].sort(),
  };
}
