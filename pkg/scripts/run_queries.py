#!/usr/bin/env python3
"""Run the bundled query files against the fixture corpus and print CSV."""

from __future__ import annotations

import sys
from pathlib import Path

from orkgdk.ingest import IdMinter, Provenance, load_ingest_document
from orkgdk.query import explain, parse_query, evaluate
from orkgdk.rdf import Graph
from orkgdk.store import apply_document

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    graph = Graph()
    document = load_ingest_document((ROOT / "fixtures" / "scientific_ie.json").read_text("utf-8"))
    provenance = Provenance(created_at="2023-07-01T00:00:00+00:00", created_by="curation-team")
    apply_document(graph, document, provenance, IdMinter(start=1))
    for path in sorted((ROOT / "fixtures" / "queries").glob("*.rq")):
        ast = parse_query(path.read_text("utf-8"))
        print(f"== {path.name} ==")
        print(explain(ast))
        print()
        print(evaluate(graph, ast).to_csv())
    return 0


if __name__ == "__main__":
    sys.exit(main())
