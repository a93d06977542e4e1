"""Triple/term data model and the in-memory graph with pattern matching.

Design points baked into the model:

* There are no blank nodes. Every node is a named IRI, which keeps graph
  equality and round-trips exact set comparisons.
* Plain literals are normalized to xsd:string at construction, so a plain
  "Method" and "Method"^^xsd:string are the same term.
* ``match`` and iteration are deterministic (lexicographic over a canonical
  term serialization), so query results and exports are byte-stable.

A :class:`Graph` is used as an immutable snapshot by all readers; mutation
happens under the exclusive-writer contract enforced by the store layer.
Published subgraphs are frozen: inserting or removing a triple whose subject
belongs to a published snapshot raises :class:`ImmutablePublishedError`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from . import namespaces as ns


class TermError(ValueError):
    """Raised when a Term or Triple invariant would be violated."""


class ImmutablePublishedError(RuntimeError):
    """Raised on mutation of a subgraph that has been published."""


_IRI_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:[^\s<>\"{}|^`\\]*$")


@dataclass(frozen=True)
class Iri:
    """An absolute IRI node."""

    iri: str

    def __post_init__(self) -> None:
        if not _IRI_RE.match(self.iri):
            raise TermError(f"not an absolute IRI: {self.iri!r}")

    @property
    def kind(self) -> str:
        return "iri"

    def sort_key(self) -> str:
        return f"<{self.iri}>"

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"<{self.iri}>"


@dataclass(frozen=True)
class Literal:
    """A typed literal. Plain literals get datatype xsd:string.

    A language tag is only allowed (and then required) together with the
    rdf:langString datatype; passing ``language=`` alone selects it.
    """

    lexical: str
    datatype: str = ns.XSD_STRING
    language: str | None = None

    def __post_init__(self) -> None:
        if self.language is not None:
            if self.datatype not in (ns.XSD_STRING, ns.RDF_LANG_STRING):
                raise TermError("language tags require rdf:langString")
            object.__setattr__(self, "datatype", ns.RDF_LANG_STRING)
        elif self.datatype == ns.RDF_LANG_STRING:
            raise TermError("rdf:langString literals need a language tag")
        if not _IRI_RE.match(self.datatype):
            raise TermError(f"datatype is not an IRI: {self.datatype!r}")

    @property
    def kind(self) -> str:
        return "literal"

    def sort_key(self) -> str:
        return f'"{self.lexical}"^^<{self.datatype}>@{self.language or ""}'

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        if self.language:
            return f'"{self.lexical}"@{self.language}'
        return f'"{self.lexical}"^^{ns.to_prefixed(self.datatype)}'


Term = Iri | Literal


@dataclass(frozen=True)
class Triple:
    subject: Iri
    predicate: Iri
    object: Term

    def __post_init__(self) -> None:
        if not isinstance(self.subject, Iri):
            raise TermError("triple subject must be an IRI")
        if not isinstance(self.predicate, Iri):
            raise TermError("triple predicate must be an IRI")
        if not isinstance(self.object, (Iri, Literal)):
            raise TermError("triple object must be a Term")

    def sort_key(self) -> tuple[str, str, str]:
        return (self.subject.sort_key(), self.predicate.sort_key(), self.object.sort_key())


# Well-known terms.
TYPE = Iri(ns.RDF + "type")
LABEL = Iri(ns.RDFS + "label")
SAME_AS = Iri(ns.OWL + "sameAs")
QUANTITY = Iri(ns.QUDT + "Quantity")
SCHEMA_IDENTIFIER = Iri(ns.SCHEMA + "identifier")


def res(local: str) -> Iri:
    return Iri(ns.RES + local)


def prop(local: str) -> Iri:
    return Iri(ns.PRED + local)


def cls(local: str) -> Iri:
    return Iri(ns.CLASS + local)


def tpl(local: str) -> Iri:
    return Iri(ns.ORKGT + local)


def schema(local: str) -> Iri:
    return Iri(ns.SCHEMA + local)


class Graph:
    """A set of triples with namespace bindings and positional indexes.

    Insertion is idempotent (set semantics). ``match`` returns triples in a
    deterministic lexicographic order so that everything downstream (query
    evaluation, serialization, exports) is reproducible byte for byte.
    """

    def __init__(self, namespaces: dict[str, str] | None = None):
        self._triples: set[Triple] = set()
        self._by_s: dict[Iri, set[Triple]] = {}
        self._by_p: dict[Iri, set[Triple]] = {}
        self._by_o: dict[Term, set[Triple]] = {}
        self.namespaces: dict[str, str] = dict(ns.BUILTIN_PREFIXES)
        if namespaces:
            self.namespaces.update(namespaces)
        self._frozen_subjects: set[str] = set()
        self._published: dict[str, str] = {}

    # -- mutation ---------------------------------------------------------

    def insert(self, triple: Triple) -> "Graph":
        self._guard(triple)
        if triple not in self._triples:
            self._triples.add(triple)
            self._by_s.setdefault(triple.subject, set()).add(triple)
            self._by_p.setdefault(triple.predicate, set()).add(triple)
            self._by_o.setdefault(triple.object, set()).add(triple)
        return self

    def insert_all(self, triples: Iterable[Triple]) -> "Graph":
        for t in triples:
            self.insert(t)
        return self

    def remove(self, triple: Triple) -> "Graph":
        self._guard(triple)
        if triple in self._triples:
            self._triples.discard(triple)
            self._by_s[triple.subject].discard(triple)
            self._by_p[triple.predicate].discard(triple)
            self._by_o[triple.object].discard(triple)
        return self

    def _guard(self, triple: Triple) -> None:
        if triple.subject.iri in self._frozen_subjects:
            raise ImmutablePublishedError(
                f"{triple.subject.iri} belongs to a published snapshot and is immutable"
            )

    def bind(self, prefix: str, base: str) -> None:
        self.namespaces[prefix] = base

    # -- queries ----------------------------------------------------------

    def match(
        self,
        s: Iri | None = None,
        p: Iri | None = None,
        o: Term | None = None,
    ) -> list[Triple]:
        """All triples matching the concrete positions, sorted."""
        if s is not None:
            candidates = self._by_s.get(s, set())
        elif o is not None:
            candidates = self._by_o.get(o, set())
        elif p is not None:
            candidates = self._by_p.get(p, set())
        else:
            candidates = self._triples
        out = [
            t
            for t in candidates
            if (s is None or t.subject == s)
            and (p is None or t.predicate == p)
            and (o is None or t.object == o)
        ]
        out.sort(key=Triple.sort_key)
        return out

    def objects(self, s: Iri, p: Iri) -> list[Term]:
        return [t.object for t in self.match(s, p, None)]

    def value(self, s: Iri, p: Iri) -> Term | None:
        objs = self.objects(s, p)
        return objs[0] if objs else None

    def subjects(self, p: Iri | None = None, o: Term | None = None) -> list[Iri]:
        seen: list[Iri] = []
        for t in self.match(None, p, o):
            if not seen or seen[-1] != t.subject:
                if t.subject not in seen:
                    seen.append(t.subject)
        return seen

    def reachable_from(self, root: Iri) -> set[str]:
        """IRIs reachable from root by following outgoing triples."""
        visited: set[str] = set()
        stack = [root]
        while stack:
            node = stack.pop()
            if node.iri in visited:
                continue
            visited.add(node.iri)
            for t in self._by_s.get(node, ()):  # order irrelevant for a set
                if isinstance(t.object, Iri) and t.object.iri not in visited:
                    stack.append(t.object)
        return visited

    # -- published-state bookkeeping --------------------------------------

    def mark_published(self, root: str, persistent_id: str) -> None:
        self._published[root] = persistent_id
        self._frozen_subjects |= self.reachable_from(Iri(root))

    def published_id(self, root: str) -> str | None:
        return self._published.get(root)

    @property
    def published_roots(self) -> dict[str, str]:
        return dict(self._published)

    def is_frozen(self, iri: str) -> bool:
        return iri in self._frozen_subjects

    def refresh_published_state(self) -> None:
        """Recover published roots from identifier triples (after a load)."""
        for t in self.match(None, SCHEMA_IDENTIFIER, None):
            obj = t.object
            if isinstance(obj, Literal) and obj.lexical.startswith(ns.DOI_PREFIX):
                self.mark_published(t.subject.iri, obj.lexical)

    # -- container protocol -----------------------------------------------

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, triple: Triple) -> bool:
        return triple in self._triples

    def __iter__(self) -> Iterator[Triple]:
        return iter(sorted(self._triples, key=Triple.sort_key))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    __hash__ = None  # type: ignore[assignment]  # mutable container

    def triple_set(self) -> frozenset[Triple]:
        return frozenset(self._triples)

    def copy(self) -> "Graph":
        g = Graph()
        g._triples = set(self._triples)
        g._by_s = {k: set(v) for k, v in self._by_s.items()}
        g._by_p = {k: set(v) for k, v in self._by_p.items()}
        g._by_o = {k: set(v) for k, v in self._by_o.items()}
        g.namespaces = dict(self.namespaces)
        g._frozen_subjects = set(self._frozen_subjects)
        g._published = dict(self._published)
        return g

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"<Graph of {len(self._triples)} triples>"
