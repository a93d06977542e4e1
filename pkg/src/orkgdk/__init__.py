"""orkgdk: structured research-dataset descriptions in an RDF graph.

Library surface: RDF core (terms, graph, Turtle), templates and validation,
record ingestion with FAIR provenance, a SELECT query engine, comparison
tables, and the HTTP service behind the ``odk`` CLI.
"""

from .rdf import Graph, Iri, Literal, Term, Triple
from .turtle import parse_turtle, serialize_turtle
from .templates import ConformanceReport, PropertyShape, Template, builtin_templates, validate
from .ingest import (
    ContributionRecord,
    IdMinter,
    PaperRecord,
    Provenance,
    ingest_paper,
    link_same_as,
    publish,
)
from .query import QueryAst, ResultTable, evaluate, explain, parse_query, run_query
from .comparison import (
    ComparisonTable,
    FilterSpec,
    build_comparison,
    export_table,
    filter_table,
    timeline,
)
from .store import GraphStore

__all__ = [
    "Graph",
    "Iri",
    "Literal",
    "Term",
    "Triple",
    "parse_turtle",
    "serialize_turtle",
    "ConformanceReport",
    "PropertyShape",
    "Template",
    "builtin_templates",
    "validate",
    "ContributionRecord",
    "IdMinter",
    "PaperRecord",
    "Provenance",
    "ingest_paper",
    "link_same_as",
    "publish",
    "QueryAst",
    "ResultTable",
    "evaluate",
    "explain",
    "parse_query",
    "run_query",
    "ComparisonTable",
    "FilterSpec",
    "build_comparison",
    "export_table",
    "filter_table",
    "timeline",
    "GraphStore",
]

__version__ = "0.1.0"
