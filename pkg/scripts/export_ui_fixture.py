#!/usr/bin/env python3
"""Regenerate the frontend contract fixtures from the server-side logic.

Writes the fixture comparison table plus the expected output of
``filter_table`` for the contract filter specs into
frontend/tests/fixtures/, so the client test suite can assert that its
filtering mirrors the server exactly.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from orkgdk.comparison import FilterSpec, RequireClause, build_comparison, filter_table, table_to_dict, timeline
from orkgdk.ingest import IdMinter, Provenance, load_ingest_document, publish
from orkgdk.rdf import Graph, Iri
from orkgdk.store import apply_document

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "frontend" / "tests" / "fixtures"

SPECS: dict[str, FilterSpec] = {
    "entity_type_method": FilterSpec(
        require=(RequireClause("labeled entity type", "=", "Method"),)
    ),
    "f1_above_0_7": FilterSpec(require=(RequireClause("F1-score", ">", "0.7"),)),
    "years_2011_2022": FilterSpec(year_range=(2011, 2022)),
    "hide_description": FilterSpec(hide_properties=frozenset({"description"})),
    "combined": FilterSpec(
        hide_properties=frozenset({"URL"}),
        require=(RequireClause("F1-score", ">", "0.7"),),
        year_range=(2014, 2022),
    ),
}


def main() -> int:
    graph = Graph()
    document = load_ingest_document((ROOT / "fixtures" / "scientific_ie.json").read_text("utf-8"))
    provenance = Provenance(created_at="2023-07-01T00:00:00+00:00", created_by="curation-team")
    apply_document(graph, document, provenance, IdMinter(start=1))
    root = Iri("https://orkg.org/resource/R280270")
    publish(graph, root, provenance)
    table = build_comparison(graph, root)

    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "comparison.json").write_text(json.dumps(table_to_dict(table), indent=2) + "\n")

    expected = {}
    for name, spec in SPECS.items():
        filtered = filter_table(table, spec)
        expected[name] = {
            "spec": {
                "hide_properties": sorted(spec.hide_properties),
                "require": [
                    {"property": c.property, "op": c.op, "value": c.value} for c in spec.require
                ],
                "year_range": list(spec.year_range) if spec.year_range else None,
            },
            "table": table_to_dict(filtered),
        }
    (OUT / "expected_filters.json").write_text(json.dumps(expected, indent=2) + "\n")

    buckets = [
        {"year": "unknown" if year is None else year, "contributions": members}
        for year, members in timeline(table)
    ]
    (OUT / "timeline.json").write_text(json.dumps({"timeline": buckets}, indent=2) + "\n")
    print(f"wrote {OUT}/comparison.json, expected_filters.json, timeline.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
