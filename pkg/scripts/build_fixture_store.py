#!/usr/bin/env python3
"""Build a Turtle store from the bundled fixture corpus.

Usage: python scripts/build_fixture_store.py [OUT.ttl]

Deterministic: fixed provenance and identifier counters, so two runs write
byte-identical files.
"""

from __future__ import annotations

import sys
from pathlib import Path

from orkgdk.ingest import IdMinter, Provenance, load_ingest_document
from orkgdk.rdf import Graph
from orkgdk.store import apply_document
from orkgdk.turtle import serialize_turtle

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else ROOT / "store.ttl"
    document = load_ingest_document((ROOT / "fixtures" / "scientific_ie.json").read_text("utf-8"))
    graph = Graph()
    provenance = Provenance(created_at="2023-07-01T00:00:00+00:00", created_by="curation-team")
    results = apply_document(graph, document, provenance, IdMinter(start=1))
    out.write_text(serialize_turtle(graph), "utf-8")
    print(f"wrote {out} ({len(graph)} triples, {sum(len(r.contributions) for r in results)} contributions)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
