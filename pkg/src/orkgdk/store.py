"""Store wrapper: Turtle-file persistence and the read/write contract.

Readers always get the current graph object and never mutate it; writers go
through :meth:`GraphStore.mutate`, which copies the graph, applies the change
and atomically swaps the reference (and rewrites the backing file via a
temp-file rename). That gives many concurrent readers a consistent snapshot
while writes stay serialized.
"""

from __future__ import annotations

import os
import tempfile
import threading
from pathlib import Path
from typing import Callable, TypeVar

from . import comparison as cmp
from . import ingest
from .ingest import IdMinter, IngestDocument, IngestError, IngestResult, Provenance
from .rdf import Graph, Iri
from .turtle import parse_turtle, serialize_turtle

T = TypeVar("T")


class GraphStore:
    def __init__(self, graph: Graph | None = None, path: str | Path | None = None):
        self._graph = graph if graph is not None else Graph()
        self.path = Path(path) if path is not None else None
        self._write_lock = threading.Lock()

    @classmethod
    def open(cls, path: str | Path) -> "GraphStore":
        """Load a store from a Turtle file (an absent file means empty)."""
        p = Path(path)
        graph = parse_turtle(p.read_text("utf-8")) if p.exists() else Graph()
        return cls(graph=graph, path=p)

    @property
    def graph(self) -> Graph:
        """The current immutable snapshot; do not mutate it."""
        return self._graph

    def mutate(self, fn: Callable[[Graph], T]) -> T:
        with self._write_lock:
            draft = self._graph.copy()
            result = fn(draft)
            self._graph = draft
            if self.path is not None:
                self.save(self.path)
            return result

    def save(self, path: str | Path) -> None:
        """Write the store atomically (temp file + rename)."""
        p = Path(path)
        text = serialize_turtle(self._graph)
        fd, tmp = tempfile.mkstemp(dir=p.parent or Path("."), suffix=".ttl.tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(text)
            os.replace(tmp, p)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def resolve_resource(identifier: str) -> Iri:
    """Accept a full IRI or a bare local name in the resource namespace."""
    if ":" in identifier and not identifier.startswith(":"):
        try:
            return Iri(identifier)
        except ValueError:
            pass
    import orkgdk.namespaces as ns

    return Iri(ns.RES + identifier)


def resolve_template_id(identifier: str) -> str:
    if identifier.startswith("http"):
        return identifier
    import orkgdk.namespaces as ns

    return ns.ORKGT + identifier


def apply_document(
    graph: Graph,
    document: IngestDocument,
    provenance: Provenance,
    minter: IdMinter | None = None,
    dedupe: bool = True,
) -> list[IngestResult]:
    """Ingest a whole document: papers first, then declared comparisons."""
    minter = minter if minter is not None else IdMinter.from_graph(graph)
    results = [
        ingest.ingest_paper(record, graph, provenance, minter, dedupe=dedupe)
        for record in document.papers
    ]
    for decl in document.comparisons:
        members = []
        for name in decl.contributions:
            found = _contribution_by_name(graph, name)
            if found is None:
                raise IngestError(
                    "comparisons", f"no ingested contribution is named {name!r}"
                )
            members.append(found)
        cmp.create_comparison(graph, resolve_resource(decl.id), decl.label, members)
    return results


def _contribution_by_name(graph: Graph, name: str) -> Iri | None:
    from .rdf import LABEL, Literal, Triple, TYPE

    for t in graph.match(None, TYPE, cmp.C_DATASET):
        if Triple(t.subject, LABEL, Literal(name)) in graph:
            return t.subject
    return None
