from __future__ import annotations

from pathlib import Path

import pytest

from orkgdk.ingest import IdMinter, Provenance, load_ingest_document
from orkgdk.rdf import Graph, Iri, Literal, Triple
from orkgdk.store import apply_document

ROOT = Path(__file__).resolve().parent.parent
FIXTURE_JSON = ROOT / "fixtures" / "scientific_ie.json"
QUERY_DIR = ROOT / "fixtures" / "queries"

FIXED_PROVENANCE = Provenance(created_at="2023-07-01T00:00:00+00:00", created_by="curation-team")
COMPARISON_ROOT = Iri("https://orkg.org/resource/R280270")


def build_fixture_graph() -> Graph:
    graph = Graph()
    document = load_ingest_document(FIXTURE_JSON.read_text("utf-8"))
    apply_document(graph, document, FIXED_PROVENANCE, IdMinter(start=1))
    return graph


@pytest.fixture
def fixture_graph() -> Graph:
    return build_fixture_graph()


@pytest.fixture
def fixture_document():
    return load_ingest_document(FIXTURE_JSON.read_text("utf-8"))


@pytest.fixture
def query1_text() -> str:
    return (QUERY_DIR / "datasets_by_task.rq").read_text("utf-8")


@pytest.fixture
def query2_text() -> str:
    return (QUERY_DIR / "entity_type_filter.rq").read_text("utf-8")


def contribution_named(graph: Graph, name: str) -> Iri:
    from orkgdk import namespaces as ns
    from orkgdk.rdf import LABEL, TYPE

    for t in graph.match(None, TYPE, Iri(ns.CLASS + "Dataset")):
        if Triple(t.subject, LABEL, Literal(name)) in graph:
            return t.subject
    raise AssertionError(f"no contribution named {name!r} in fixture graph")
