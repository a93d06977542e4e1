"""Tabular comparison views over a set of dataset contributions.

A comparison root links its members via pred:compareContribution. Rows are
the union of predicates appearing on any member, merged through the
owl:sameAs equivalence closure; columns are the members with their paper
title and year. Nested instances (quality results, evaluation items,
leaderboard entries) render as compound "label: score (metric)" values that
keep their numeric score and metric name, which is what threshold filters
such as F1 > 0.7 operate on.

All functions are pure over a graph snapshot and produce deterministic
output; the JSON form is the wire format the HTTP service and the explorer
UI share.
"""

from __future__ import annotations

import html as html_mod
import csv
import io
import json
from dataclasses import dataclass, field, replace
from decimal import Decimal, InvalidOperation
from typing import Mapping, Sequence

from . import namespaces as ns
from .ingest import (
    P_HAS_CONTRIBUTION,
    P_METRIC,
    P_PUBLICATION_YEAR,
    P_SCORE,
    Provenance,
    published_metadata,
    same_as_classes,
)
from .rdf import Graph, Iri, Literal, Term, Triple, TYPE, LABEL

P_COMPARE = Iri(ns.PRED + "compareContribution")
C_COMPARISON = Iri(ns.CLASS + "Comparison")
C_DATASET = Iri(ns.CLASS + "Dataset")

_COMPOUND_CLASSES = (
    Iri(ns.CLASS + "DataCentricResult"),
    Iri(ns.CLASS + "Leaderboard"),
    Iri(ns.CLASS + "EvaluationItem"),
)


class NotFoundError(LookupError):
    pass


class TypeViolationError(ValueError):
    def __init__(self, member: str):
        super().__init__(f"comparison member {member} is not typed class:Dataset")
        self.member = member


@dataclass(frozen=True)
class CellValue:
    text: str
    number: Decimal | None = None
    metric: str | None = None


@dataclass(frozen=True)
class ComparisonColumn:
    iri: str
    label: str
    paper_title: str | None = None
    year: int | None = None


@dataclass(frozen=True)
class ComparisonRow:
    property: str  # representative IRI of the merged equivalence class
    label: str
    properties: tuple[str, ...]  # every merged property IRI, sorted
    cells: tuple[tuple[CellValue, ...], ...]  # one tuple per column


@dataclass
class ComparisonTable:
    id: str
    label: str
    columns: list[ComparisonColumn]
    rows: list[ComparisonRow]
    provenance: Provenance | None = None
    persistent_id: str | None = None
    warnings: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class RequireClause:
    property: str
    op: str  # = > >= < <=
    value: str


@dataclass(frozen=True)
class FilterSpec:
    hide_properties: frozenset[str] = frozenset()
    require: tuple[RequireClause, ...] = ()
    year_range: tuple[int, int] | None = None

    def is_empty(self) -> bool:
        return not self.hide_properties and not self.require and self.year_range is None


def create_comparison(
    graph: Graph, comparison: Iri, label: str, contributions: Sequence[Iri]
) -> Iri:
    """Materialize a comparison resource linking the given contributions."""
    graph.insert(Triple(comparison, TYPE, C_COMPARISON))
    graph.insert(Triple(comparison, LABEL, Literal(label)))
    for c in contributions:
        graph.insert(Triple(comparison, P_COMPARE, c))
    return comparison


def _display_label(graph: Graph, node: Iri) -> str:
    value = graph.value(node, LABEL)
    if isinstance(value, Literal):
        return value.lexical
    return ns.to_prefixed(node.iri, graph.namespaces)


def _parse_decimal(lexical: str) -> Decimal | None:
    """Finite decimal value or None; NaN/Infinity never reach comparators."""
    try:
        value = Decimal(lexical)
    except InvalidOperation:
        return None
    return value if value.is_finite() else None


def _render_term(graph: Graph, term: Term) -> CellValue:
    if isinstance(term, Literal):
        number = None
        if term.datatype in ns.NUMERIC_DATATYPES:
            number = _parse_decimal(term.lexical)
        return CellValue(text=term.lexical, number=number)
    for klass in _COMPOUND_CLASSES:
        if Triple(term, TYPE, klass) in graph:
            return _render_compound(graph, term)
    return CellValue(text=_display_label(graph, term))


def _render_compound(graph: Graph, node: Iri) -> CellValue:
    """Nested instances render as "label: score (metric)"."""
    label = _display_label(graph, node)
    score = graph.value(node, P_SCORE)
    metric_node = graph.value(node, P_METRIC)
    number = None
    text = label
    if isinstance(score, Literal):
        number = _parse_decimal(score.lexical)
        text += f": {score.lexical}"
    metric_label = None
    if isinstance(metric_node, Iri):
        metric_label = _display_label(graph, metric_node)
        text += f" ({metric_label})"
    return CellValue(text=text, number=number, metric=metric_label)


def build_comparison(graph: Graph, comparison_root: Iri) -> ComparisonTable:
    """Assemble the properties-by-contributions table for a comparison root."""
    links = graph.match(comparison_root, P_COMPARE, None)
    if not links:
        raise NotFoundError(f"{comparison_root.iri} has no compareContribution links")
    members = [t.object for t in links if isinstance(t.object, Iri)]
    for member in members:
        if Triple(member, TYPE, C_DATASET) not in graph:
            raise TypeViolationError(member.iri)

    columns = []
    for member in members:
        paper_title = None
        year = None
        papers = graph.match(None, P_HAS_CONTRIBUTION, member)
        if papers:
            paper = papers[0].subject
            paper_title = _display_label(graph, paper)
            year_term = graph.value(paper, P_PUBLICATION_YEAR)
            if isinstance(year_term, Literal):
                try:
                    year = int(year_term.lexical)
                except ValueError:
                    year = None
        columns.append(
            ComparisonColumn(
                iri=member.iri,
                label=_display_label(graph, member),
                paper_title=paper_title,
                year=year,
            )
        )

    used: set[str] = set()
    for member in members:
        used |= {t.predicate.iri for t in graph.match(member, None, None)}
    closure = same_as_classes(graph)
    merged: dict[frozenset[str], set[str]] = {}
    for prop_iri in used:
        key = closure.get(prop_iri, frozenset({prop_iri}))
        merged.setdefault(key, set()).add(prop_iri)

    rows = []
    for _, used_props in sorted(merged.items(), key=lambda kv: min(kv[1])):
        props = tuple(sorted(used_props))
        representative = props[0]
        label = _display_label(graph, Iri(representative))
        cells = []
        for member in members:
            terms: list[Term] = []
            for prop_iri in props:
                for obj in graph.objects(member, Iri(prop_iri)):
                    if obj not in terms:
                        terms.append(obj)
            values = sorted(
                (_render_term(graph, t) for t in terms), key=lambda v: (v.text, str(v.metric))
            )
            cells.append(tuple(values))
        rows.append(
            ComparisonRow(property=representative, label=label, properties=props, cells=tuple(cells))
        )

    # coverage-first ordering, then label; the representative breaks ties.
    def coverage(row: ComparisonRow) -> int:
        return sum(1 for cell in row.cells if cell)

    rows.sort(key=lambda row: (-coverage(row), row.label, row.property))

    meta = published_metadata(graph, comparison_root)
    provenance = None
    persistent_id = None
    if meta is not None:
        persistent_id = meta["persistent_id"]
        if meta["created_at"] and meta["created_by"] and meta["license"]:
            provenance = Provenance(
                created_at=meta["created_at"],
                created_by=meta["created_by"],
                license=meta["license"],
            )
    return ComparisonTable(
        id=comparison_root.iri,
        label=_display_label(graph, comparison_root),
        columns=columns,
        rows=rows,
        provenance=provenance,
        persistent_id=persistent_id,
    )


# -- filtering ---------------------------------------------------------------


def _row_matches(row: ComparisonRow, name: str) -> bool:
    return name == row.label or name == row.property or name in row.properties


def _value_satisfies(
    value: CellValue, op: str, raw: str, warnings: set[str], clause: RequireClause
) -> bool:
    target = _parse_decimal(raw)
    number = value.number if value.number is not None and value.number.is_finite() else None
    if op == "=":
        if number is not None and target is not None:
            return number == target
        return value.text == raw
    if number is None or target is None:
        warnings.add(
            f"comparator {op} skipped a non-numeric value for {clause.property!r}"
        )
        return False
    return {
        ">": number > target,
        ">=": number >= target,
        "<": number < target,
        "<=": number <= target,
    }[op]


def _column_satisfies(
    table: ComparisonTable, col_index: int, clause: RequireClause, warnings: set[str]
) -> bool:
    """A clause names either a table row or a metric carried by cell values."""
    for row in table.rows:
        named_row = _row_matches(row, clause.property)
        for value in row.cells[col_index]:
            if named_row and _value_satisfies(value, clause.op, clause.value, warnings, clause):
                return True
            if value.metric == clause.property and _value_satisfies(
                value, clause.op, clause.value, warnings, clause
            ):
                return True
    return False


def filter_table(table: ComparisonTable, spec: FilterSpec) -> ComparisonTable:
    """Apply a filter spec; the input table is left untouched.

    Require clauses and the year range drop columns; hide_properties drops
    rows. Clauses are evaluated against the full (unhidden) row set. A
    numeric comparator meeting a non-numeric cell value records a warning
    and never crashes.
    """
    warnings: set[str] = set()
    keep = []
    for i, column in enumerate(table.columns):
        ok = all(_column_satisfies(table, i, clause, warnings) for clause in spec.require)
        if ok and spec.year_range is not None:
            lo, hi = spec.year_range
            ok = column.year is not None and lo <= column.year <= hi
        if ok:
            keep.append(i)

    rows = []
    for row in table.rows:
        if any(_row_matches(row, hidden) for hidden in spec.hide_properties):
            continue
        rows.append(replace(row, cells=tuple(row.cells[i] for i in keep)))
    return ComparisonTable(
        id=table.id,
        label=table.label,
        columns=[table.columns[i] for i in keep],
        rows=rows,
        provenance=table.provenance,
        persistent_id=table.persistent_id,
        warnings=sorted(warnings),
    )


# -- exports -------------------------------------------------------------------


def table_to_dict(table: ComparisonTable) -> dict:
    return {
        "id": table.id,
        "label": table.label,
        "columns": [
            {
                "iri": c.iri,
                "label": c.label,
                "paper_title": c.paper_title,
                "year": c.year,
            }
            for c in table.columns
        ],
        "rows": [
            {
                "property": r.property,
                "label": r.label,
                "properties": list(r.properties),
                "cells": [
                    [
                        {
                            "text": v.text,
                            "number": None if v.number is None else str(v.number),
                            "metric": v.metric,
                        }
                        for v in cell
                    ]
                    for cell in r.cells
                ],
            }
            for r in table.rows
        ],
        "provenance": None
        if table.provenance is None
        else {
            "created_at": table.provenance.created_at,
            "created_by": table.provenance.created_by,
            "license": table.provenance.license,
        },
        "persistent_id": table.persistent_id,
        "warnings": list(table.warnings),
    }


def table_from_dict(data: Mapping) -> ComparisonTable:
    columns = [
        ComparisonColumn(
            iri=c["iri"],
            label=c["label"],
            paper_title=c.get("paper_title"),
            year=c.get("year"),
        )
        for c in data["columns"]
    ]
    rows = [
        ComparisonRow(
            property=r["property"],
            label=r["label"],
            properties=tuple(r["properties"]),
            cells=tuple(
                tuple(
                    CellValue(
                        text=v["text"],
                        number=None if v.get("number") is None else Decimal(v["number"]),
                        metric=v.get("metric"),
                    )
                    for v in cell
                )
                for cell in r["cells"]
            ),
        )
        for r in data["rows"]
    ]
    prov = data.get("provenance")
    return ComparisonTable(
        id=data["id"],
        label=data["label"],
        columns=columns,
        rows=rows,
        provenance=None
        if prov is None
        else Provenance(
            created_at=prov["created_at"],
            created_by=prov["created_by"],
            license=prov["license"],
        ),
        persistent_id=data.get("persistent_id"),
        warnings=list(data.get("warnings", [])),
    )


def _cell_text(cell: tuple[CellValue, ...]) -> str:
    return "; ".join(v.text for v in cell)


def _to_csv(table: ComparisonTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(["property"] + [c.label for c in table.columns])
    for row in table.rows:
        writer.writerow([row.label] + [_cell_text(cell) for cell in row.cells])
    return buf.getvalue()


def _to_html(table: ComparisonTable) -> str:
    esc = html_mod.escape
    head = "".join(f"<th>{esc(c.label)}</th>" for c in table.columns)
    body = []
    for row in table.rows:
        cells = "".join(f"<td>{esc(_cell_text(cell))}</td>" for cell in row.cells)
        body.append(f"<tr><th>{esc(row.label)}</th>{cells}</tr>")
    rows_html = "\n".join(body)
    return (
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">"
        f"<title>{esc(table.label)}</title></head>\n"
        f"<body>\n<h1>{esc(table.label)}</h1>\n"
        f"<table>\n<tr><th>property</th>{head}</tr>\n{rows_html}\n</table>\n"
        "</body></html>\n"
    )


def comparison_subgraph(graph: Graph, root: Iri) -> Graph:
    """Triples reachable from the comparison root (incl. provenance)."""
    reachable = graph.reachable_from(root)
    out = Graph(graph.namespaces)
    for t in graph.match():
        if t.subject.iri in reachable:
            out.insert(t)
    return out


def export_table(
    table: ComparisonTable, fmt: str, graph: Graph | None = None
) -> bytes:
    """Serialize a comparison table; Turtle needs the source graph."""
    if fmt == "json":
        return (json.dumps(table_to_dict(table), indent=2) + "\n").encode("utf-8")
    if fmt == "csv":
        return _to_csv(table).encode("utf-8")
    if fmt == "html":
        return _to_html(table).encode("utf-8")
    if fmt in ("ttl", "turtle"):
        if graph is None:
            raise ValueError("turtle export needs the source graph")
        from .turtle import serialize_turtle

        return serialize_turtle(comparison_subgraph(graph, Iri(table.id))).encode("utf-8")
    raise ValueError(f"unknown export format {fmt!r}")


def timeline(table: ComparisonTable) -> list[tuple[int | None, list[str]]]:
    """Columns bucketed by paper year ascending; missing years go last."""
    buckets: dict[int | None, list[str]] = {}
    for column in table.columns:
        buckets.setdefault(column.year, []).append(column.iri)
    known = sorted((y, members) for y, members in buckets.items() if y is not None)
    out: list[tuple[int | None, list[str]]] = list(known)
    if None in buckets:
        out.append((None, buckets[None]))
    return out
