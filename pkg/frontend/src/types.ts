/**
 * Wire types shared with the orkgdk service.
 *
 * These mirror the JSON produced by the comparison export endpoint; the
 * `number` field of a cell value is a decimal string (or null) so scores
 * survive transport without float drift.
 */

export interface CellValue {
  text: string;
  number: string | null;
  metric: string | null;
}

export interface ComparisonColumn {
  iri: string;
  label: string;
  paper_title: string | null;
  year: number | null;
}

export interface ComparisonRow {
  property: string;
  label: string;
  properties: string[];
  cells: CellValue[][];
}

export interface Provenance {
  created_at: string;
  created_by: string;
  license: string;
}

export interface ComparisonTable {
  id: string;
  label: string;
  columns: ComparisonColumn[];
  rows: ComparisonRow[];
  provenance: Provenance | null;
  persistent_id: string | null;
  warnings: string[];
}

export type ComparatorOp = "=" | ">" | ">=" | "<" | "<=";

export interface RequireClause {
  property: string;
  op: ComparatorOp;
  value: string;
}

export interface FilterSpec {
  hide_properties: string[];
  require: RequireClause[];
  year_range: [number, number] | null;
}

export interface TimelineBucket {
  year: number | "unknown";
  contributions: string[];
}

export interface TimelineDoc {
  timeline: TimelineBucket[];
}
