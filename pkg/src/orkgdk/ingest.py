"""Turn declarative paper/dataset records into graph triples.

Each contribution is dual-typed (class:Contribution and class:Dataset),
research problems / metrics / entity types are deduplicated by label,
quality results and leaderboards become nested template instances, and
every construction is validated against the built-in templates before the
function returns — a record that passes its own invariants can never
produce a nonconforming contribution.

Publishing stamps provenance and a locally minted DOI-like identifier on a
root and freezes its subgraph; real registrar integration is a single
pluggable seam (``registrar=`` callable) with the local stub as default.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Callable, Iterable, Mapping

from . import namespaces as ns
from . import templates as tpl
from .rdf import (
    Graph,
    Iri,
    Literal,
    SAME_AS,
    SCHEMA_IDENTIFIER,
    Triple,
    TYPE,
    LABEL,
    QUANTITY,
)

GRANULARITIES = ("entities", "relations", "sentences", "documents", "spans")

C_PAPER = Iri(ns.CLASS + "Paper")
C_CONTRIBUTION = Iri(ns.CLASS + "Contribution")
C_DATASET = Iri(ns.CLASS + "Dataset")
C_RESEARCH_PROBLEM = Iri(ns.CLASS + "ResearchProblem")
C_ENTITY_TYPE = Iri(ns.CLASS + "EntityType")
C_RESULT = Iri(ns.CLASS + "DataCentricResult")
C_EVALUATION_ITEM = Iri(ns.CLASS + "EvaluationItem")
C_LEADERBOARD = Iri(ns.CLASS + "Leaderboard")

P_RESEARCH_PROBLEM = Iri(ns.PRED + "P32")
P_EVALUATION_ITEM = Iri(ns.PRED + "P71154")
P_ENTITY_TYPE = Iri(ns.PRED + "P34062")
P_HAS_CONTRIBUTION = Iri(ns.PRED + "hasContribution")
P_HAS_AUTHOR = Iri(ns.PRED + "hasAuthor")
P_PUBLICATION_YEAR = Iri(ns.PRED + "publicationYear")
P_DOI = Iri(ns.PRED + "doi")
P_RESEARCH_FIELD = Iri(ns.PRED + "researchField")
P_QUALITY_RESULT = Iri(ns.PRED + "hasQualityResult")
P_LEADERBOARD = Iri(ns.PRED + "hasLeaderboard")
P_METRIC = Iri(ns.PRED + "metric")
P_SCORE = Iri(ns.PRED + "score")
P_MODEL_NAME = Iri(ns.PRED + "modelName")
P_MODEL_CODE_URL = Iri(ns.PRED + "modelCodeUrl")
P_GRANULARITY = Iri(ns.PRED + "granularity")
P_CREATED_AT = Iri(ns.PRED + "createdAt")
P_CREATED_BY = Iri(ns.PRED + "createdBy")
P_LICENSE = Iri(ns.PRED + "license")

# Labels for the vocabulary the ingester emits, attached once per graph so
# comparison rows and the UI can display human names.
PROPERTY_LABELS: dict[str, str] = {
    P_RESEARCH_PROBLEM.iri: "research problem",
    P_EVALUATION_ITEM.iri: "has evaluation item",
    P_ENTITY_TYPE.iri: "labeled entity type",
    P_HAS_CONTRIBUTION.iri: "has contribution",
    P_HAS_AUTHOR.iri: "has author",
    P_PUBLICATION_YEAR.iri: "publication year",
    P_DOI.iri: "DOI",
    P_RESEARCH_FIELD.iri: "research field",
    P_QUALITY_RESULT.iri: "has quality result",
    P_LEADERBOARD.iri: "has leaderboard",
    P_METRIC.iri: "metric",
    P_SCORE.iri: "score",
    P_MODEL_NAME.iri: "model name",
    P_MODEL_CODE_URL.iri: "model code URL",
    P_GRANULARITY.iri: "granularity",
    P_CREATED_AT.iri: "created at",
    P_CREATED_BY.iri: "created by",
    P_LICENSE.iri: "license",
    SAME_AS.iri: "same as",
    ns.PRED + "compareContribution": "compare contribution",
}
PROPERTY_LABELS.update({iri: label for iri, label, _dt in tpl.METADATA_KEYS.values()})
PROPERTY_LABELS.update({iri: label for iri, label in tpl.STATISTIC_KEYS.values()})

DATA_SECTION_MARK = "# ---- data ----"


class IngestError(ValueError):
    """A record violates an invariant; ``field`` names the offending field."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


class InternalConsistencyError(RuntimeError):
    """A constructed contribution failed template validation (a bug)."""


class NotFoundError(LookupError):
    pass


class AlreadyPublishedError(RuntimeError):
    pass


# -- records -----------------------------------------------------------------


@dataclass
class EvaluationItemRecord:
    label: str
    granularity: str


@dataclass
class QualityResultRecord:
    metric: str
    score: Decimal
    evaluation_items: list[EvaluationItemRecord] = field(default_factory=list)


@dataclass
class LeaderboardRecord:
    model_name: str
    metric: str
    score: Decimal
    model_code_url: str | None = None


@dataclass
class ContributionRecord:
    name: str
    research_problems: list[str] = field(default_factory=list)
    metadata: dict[str, str | list[str]] = field(default_factory=dict)
    statistics: dict[str, int] = field(default_factory=dict)
    quality_results: list[QualityResultRecord] = field(default_factory=list)
    leaderboards: list[LeaderboardRecord] = field(default_factory=list)
    entity_types: list[str] = field(default_factory=list)
    same_as: list[str] = field(default_factory=list)


@dataclass
class PaperRecord:
    title: str
    authors: list[str]
    publication_year: int
    research_field: str
    contributions: list[ContributionRecord]
    doi: str | None = None


@dataclass(frozen=True)
class Provenance:
    created_at: str  # ISO-8601 UTC timestamp
    created_by: str
    license: str = ns.CC_BY_SA


@dataclass(frozen=True)
class PersistentId:
    value: str
    root: str
    provenance: Provenance


@dataclass
class IngestResult:
    paper: Iri
    contributions: list[Iri]


def _check_record(record: PaperRecord) -> None:
    if not record.title:
        raise IngestError("title", "must be non-empty")
    if not 1900 <= record.publication_year <= 2100:
        raise IngestError("publication_year", f"{record.publication_year} outside [1900, 2100]")
    if not record.contributions:
        raise IngestError("contributions", "a paper needs at least one contribution")
    for ci, c in enumerate(record.contributions):
        where = f"contributions[{ci}]"
        if not c.name:
            raise IngestError(f"{where}.name", "must be non-empty")
        for key in c.metadata:
            if key not in tpl.METADATA_KEYS:
                raise IngestError(f"{where}.metadata.{key}", "not a dataset-template field")
        for key, value in c.statistics.items():
            if key not in tpl.STATISTIC_KEYS:
                raise IngestError(f"{where}.statistics.{key}", "not a statistics field")
            if isinstance(value, bool) or not isinstance(value, int):
                raise IngestError(f"{where}.statistics.{key}", "must be an integer")
        for qi, q in enumerate(c.quality_results):
            if not q.score.is_finite():
                raise IngestError(f"{where}.quality_results[{qi}].score", "must be finite")
            for ei, item in enumerate(q.evaluation_items):
                if item.granularity not in GRANULARITIES:
                    raise IngestError(
                        f"{where}.quality_results[{qi}].evaluation_items[{ei}].granularity",
                        f"{item.granularity!r} not one of {sorted(GRANULARITIES)}",
                    )
        for li, entry in enumerate(c.leaderboards):
            if not entry.score.is_finite():
                raise IngestError(f"{where}.leaderboards[{li}].score", "must be finite")
            if not entry.model_name:
                raise IngestError(f"{where}.leaderboards[{li}].model_name", "must be non-empty")


# -- identifier minting --------------------------------------------------------

_KINDS = {"resource": (ns.RES, "R"), "property": (ns.PRED, "P"), "class": (ns.CLASS, "C")}


class IdMinter:
    """Deterministic R{n}/P{n}/C{n} identifier sequences, one per kind."""

    def __init__(self, start: int = 1):
        self._next = {kind: start for kind in _KINDS}

    def mint(self, kind: str) -> Iri:
        base, letter = _KINDS[kind]
        n = self._next[kind]
        self._next[kind] = n + 1
        return Iri(f"{base}{letter}{n}")

    def resource(self) -> Iri:
        return self.mint("resource")

    @classmethod
    def from_graph(cls, graph: Graph, start: int = 1) -> "IdMinter":
        """Continue numbering above anything already present in the graph."""
        import re

        minter = cls(start)
        patterns = {kind: re.compile(f"^{re.escape(base)}{letter}(\\d+)$") for kind, (base, letter) in _KINDS.items()}

        def bump(iri: str) -> None:
            for kind, pattern in patterns.items():
                m = pattern.match(iri)
                if m:
                    minter._next[kind] = max(minter._next[kind], int(m.group(1)) + 1)

        for t in graph.match():
            bump(t.subject.iri)
            bump(t.predicate.iri)
            if isinstance(t.object, Iri):
                bump(t.object.iri)
        return minter


# -- ingestion ------------------------------------------------------------------


def _ensure_vocabulary(graph: Graph) -> None:
    for iri, label in PROPERTY_LABELS.items():
        graph.insert(Triple(Iri(iri), LABEL, Literal(label)))


def _ensure_labeled_resource(graph: Graph, label: str, klass: Iri, minter: IdMinter) -> Iri:
    """Reuse the resource of this class with this exact label, or mint one."""
    for t in graph.match(None, TYPE, klass):
        if Triple(t.subject, LABEL, Literal(label)) in graph:
            return t.subject
    node = minter.resource()
    graph.insert(Triple(node, TYPE, klass))
    graph.insert(Triple(node, LABEL, Literal(label)))
    return node


def _metadata_literal(key: str, value: str) -> Literal:
    _iri, _label, datatype = tpl.METADATA_KEYS[key]
    return Literal(value, datatype)


def _decimal_literal(value: Decimal) -> Literal:
    return Literal(str(value), ns.XSD_DECIMAL)


def ingest_paper(
    record: PaperRecord,
    graph: Graph,
    provenance: Provenance,
    minter: IdMinter,
    dedupe: bool = True,
) -> IngestResult:
    """Ingest one paper record; returns the paper and contribution IRIs."""
    _check_record(record)
    if dedupe:
        for t in graph.match(None, TYPE, C_PAPER):
            if Triple(t.subject, LABEL, Literal(record.title)) in graph:
                existing = [
                    o for o in graph.objects(t.subject, P_HAS_CONTRIBUTION) if isinstance(o, Iri)
                ]
                return IngestResult(paper=t.subject, contributions=existing)

    _ensure_vocabulary(graph)
    paper = minter.resource()
    graph.insert(Triple(paper, TYPE, C_PAPER))
    graph.insert(Triple(paper, LABEL, Literal(record.title)))
    for author in record.authors:
        graph.insert(Triple(paper, P_HAS_AUTHOR, Literal(author)))
    graph.insert(
        Triple(paper, P_PUBLICATION_YEAR, Literal(str(record.publication_year), ns.XSD_INTEGER))
    )
    if record.doi:
        graph.insert(Triple(paper, P_DOI, Literal(record.doi)))
    if record.research_field:
        graph.insert(Triple(paper, P_RESEARCH_FIELD, Literal(record.research_field)))
    graph.insert(Triple(paper, P_CREATED_AT, Literal(provenance.created_at, ns.XSD_DATE_TIME)))
    graph.insert(Triple(paper, P_CREATED_BY, Literal(provenance.created_by)))
    graph.insert(Triple(paper, P_LICENSE, Iri(provenance.license)))

    contributions: list[Iri] = []
    for contribution in record.contributions:
        c = _ingest_contribution(contribution, graph, minter)
        graph.insert(Triple(paper, P_HAS_CONTRIBUTION, c))
        contributions.append(c)

    _assert_conformance(graph, contributions)
    return IngestResult(paper=paper, contributions=contributions)


def _ingest_contribution(record: ContributionRecord, graph: Graph, minter: IdMinter) -> Iri:
    c = minter.resource()
    graph.insert(Triple(c, TYPE, C_CONTRIBUTION))
    graph.insert(Triple(c, TYPE, C_DATASET))
    graph.insert(Triple(c, LABEL, Literal(record.name)))

    for problem in record.research_problems:
        node = _ensure_labeled_resource(graph, problem, C_RESEARCH_PROBLEM, minter)
        graph.insert(Triple(c, P_RESEARCH_PROBLEM, node))
    for entity_type in record.entity_types:
        node = _ensure_labeled_resource(graph, entity_type, C_ENTITY_TYPE, minter)
        graph.insert(Triple(c, P_ENTITY_TYPE, node))

    metadata = dict(record.metadata)
    metadata.setdefault("name", record.name)
    for key in sorted(metadata):
        prop_iri = Iri(tpl.METADATA_KEYS[key][0])
        values = metadata[key]
        for value in values if isinstance(values, list) else [values]:
            if not isinstance(value, str):
                raise IngestError(f"metadata.{key}", "values must be strings")
            graph.insert(Triple(c, prop_iri, _metadata_literal(key, value)))

    for key in sorted(record.statistics):
        prop_iri = Iri(tpl.STATISTIC_KEYS[key][0])
        graph.insert(Triple(c, prop_iri, Literal(str(record.statistics[key]), ns.XSD_INTEGER)))

    for quality in record.quality_results:
        node = minter.resource()
        graph.insert(Triple(node, TYPE, C_RESULT))
        graph.insert(Triple(node, LABEL, Literal(quality.metric)))
        metric = _ensure_labeled_resource(graph, quality.metric, QUANTITY, minter)
        graph.insert(Triple(node, P_METRIC, metric))
        graph.insert(Triple(node, P_SCORE, _decimal_literal(quality.score)))
        for item in quality.evaluation_items:
            item_node = minter.resource()
            graph.insert(Triple(item_node, TYPE, C_EVALUATION_ITEM))
            graph.insert(Triple(item_node, LABEL, Literal(item.label)))
            graph.insert(Triple(item_node, P_GRANULARITY, Literal(item.granularity)))
            graph.insert(Triple(node, P_EVALUATION_ITEM, item_node))
        graph.insert(Triple(c, P_QUALITY_RESULT, node))

    for entry in record.leaderboards:
        node = minter.resource()
        graph.insert(Triple(node, TYPE, C_LEADERBOARD))
        graph.insert(Triple(node, LABEL, Literal(entry.model_name)))
        graph.insert(Triple(node, P_MODEL_NAME, Literal(entry.model_name)))
        if entry.model_code_url:
            graph.insert(Triple(node, P_MODEL_CODE_URL, Literal(entry.model_code_url, ns.XSD_ANY_URI)))
        metric = _ensure_labeled_resource(graph, entry.metric, QUANTITY, minter)
        graph.insert(Triple(node, P_METRIC, metric))
        graph.insert(Triple(node, P_SCORE, _decimal_literal(entry.score)))
        graph.insert(Triple(c, P_LEADERBOARD, node))

    for target in record.same_as:
        graph.insert(Triple(c, SAME_AS, Iri(target)))
    return c


def _assert_conformance(graph: Graph, contributions: Iterable[Iri]) -> None:
    registry = tpl.builtin_templates()
    by_id = tpl.registry_map(registry)
    for c in contributions:
        checks = [by_id[tpl.DATASET_TEMPLATE_ID], by_id[tpl.STATISTICS_TEMPLATE_ID]]
        for template in checks:
            report = tpl.validate(graph, c, template, registry)
            if not report.conforms:
                raise InternalConsistencyError(
                    f"{c.iri} does not conform to {template.id}: {report.violations}"
                )
        for node in graph.objects(c, P_QUALITY_RESULT):
            if isinstance(node, Iri):
                report = tpl.validate(graph, node, by_id[tpl.RESULT_TEMPLATE_ID], registry)
                if not report.conforms:
                    raise InternalConsistencyError(f"bad result instance {node.iri}")
        for node in graph.objects(c, P_LEADERBOARD):
            if isinstance(node, Iri):
                report = tpl.validate(graph, node, by_id[tpl.LEADERBOARD_TEMPLATE_ID], registry)
                if not report.conforms:
                    raise InternalConsistencyError(f"bad leaderboard instance {node.iri}")


# -- same-as equivalence --------------------------------------------------------


def link_same_as(graph: Graph, a: Iri, b: Iri) -> Graph:
    """Assert owl:sameAs; the closure is computed lazily at comparison time."""
    return graph.insert(Triple(a, SAME_AS, b))


def same_as_classes(graph: Graph) -> dict[str, frozenset[str]]:
    """Symmetric-transitive closure over owl:sameAs, as connected components."""
    adjacency: dict[str, set[str]] = {}
    for t in graph.match(None, SAME_AS, None):
        if isinstance(t.object, Iri):
            adjacency.setdefault(t.subject.iri, set()).add(t.object.iri)
            adjacency.setdefault(t.object.iri, set()).add(t.subject.iri)
    classes: dict[str, frozenset[str]] = {}
    visited: set[str] = set()
    for start in adjacency:
        if start in visited:
            continue
        component: set[str] = set()
        stack = [start]
        while stack:
            node = stack.pop()
            if node in component:
                continue
            component.add(node)
            stack.extend(adjacency.get(node, ()))
        frozen = frozenset(component)
        for member in component:
            classes[member] = frozen
        visited |= component
    return classes


def equivalence_class(graph: Graph, iri: str) -> frozenset[str]:
    return same_as_classes(graph).get(iri, frozenset({iri}))


# -- publishing -------------------------------------------------------------------

Registrar = Callable[[Iri], str]


def local_registrar(root: Iri) -> str:
    """Default registrar: deterministic DOI-like ids, no external calls."""
    return ns.DOI_PREFIX + ns.local_name(root.iri)


def publish(
    graph: Graph,
    root: Iri,
    provenance: Provenance,
    registrar: Registrar = local_registrar,
) -> PersistentId:
    """Assign a persistent identifier, stamp provenance, freeze the subgraph."""
    if not graph.match(root, None, None) and not graph.match(None, None, root):
        raise NotFoundError(f"{root.iri} is not in the graph")
    if graph.published_id(root.iri) is not None:
        raise AlreadyPublishedError(f"{root.iri} is already published")
    if provenance.license != ns.CC_BY_SA:
        raise IngestError("license", f"published artifacts carry {ns.CC_BY_SA}")
    pid = registrar(root)
    graph.insert(Triple(root, SCHEMA_IDENTIFIER, Literal(pid)))
    graph.insert(Triple(root, P_CREATED_AT, Literal(provenance.created_at, ns.XSD_DATE_TIME)))
    graph.insert(Triple(root, P_CREATED_BY, Literal(provenance.created_by)))
    graph.insert(Triple(root, P_LICENSE, Iri(provenance.license)))
    graph.mark_published(root.iri, pid)
    return PersistentId(value=pid, root=root.iri, provenance=provenance)


def published_metadata(graph: Graph, root: Iri) -> dict | None:
    """Provenance + persistent id of a published root, without data triples."""
    pid = graph.published_id(root.iri)
    if pid is None:
        return None
    created_at = graph.value(root, P_CREATED_AT)
    created_by = graph.value(root, P_CREATED_BY)
    license_term = graph.value(root, P_LICENSE)
    return {
        "id": root.iri,
        "persistent_id": pid,
        "created_at": created_at.lexical if isinstance(created_at, Literal) else None,
        "created_by": created_by.lexical if isinstance(created_by, Literal) else None,
        "license": license_term.iri if isinstance(license_term, Iri) else None,
    }


def split_published(graph: Graph, root: Iri) -> tuple[Graph, Graph]:
    """Split into (metadata graph, data graph) for a published root."""
    if graph.published_id(root.iri) is None:
        raise NotFoundError(f"{root.iri} is not published")
    meta = Graph(graph.namespaces)
    data = Graph(graph.namespaces)
    meta_predicates = {SCHEMA_IDENTIFIER, P_CREATED_AT, P_CREATED_BY, P_LICENSE}
    for t in graph.match():
        if t.subject == root and t.predicate in meta_predicates:
            meta.insert(t)
        else:
            data.insert(t)
    return meta, data


def export_published(graph: Graph, root: Iri) -> str:
    """Two-section Turtle export: the metadata block first, then the data.

    The metadata section is a complete Turtle document of its own, so a
    consumer can read provenance without parsing any data triple.
    """
    from .turtle import serialize_turtle

    meta, data = split_published(graph, root)
    return serialize_turtle(meta) + "\n" + DATA_SECTION_MARK + "\n\n" + serialize_turtle(data)


def read_metadata_section(text: str) -> Graph:
    """Parse only the metadata section of a two-section export."""
    from .turtle import parse_turtle

    return parse_turtle(text.split(DATA_SECTION_MARK, 1)[0])


# -- ingestion documents -----------------------------------------------------------


@dataclass
class ComparisonDecl:
    id: str  # local name like R280270, or a full IRI
    label: str
    contributions: list[str]  # contribution names (rdfs:label values)


@dataclass
class IngestDocument:
    papers: list[PaperRecord]
    comparisons: list[ComparisonDecl] = field(default_factory=list)


def _as_decimal(value: object, where: str) -> Decimal:
    if isinstance(value, Decimal):
        return value
    if isinstance(value, bool):
        raise IngestError(where, "must be a number")
    if isinstance(value, (int, str, float)):
        try:
            return Decimal(str(value))
        except InvalidOperation:
            raise IngestError(where, f"not a decimal: {value!r}") from None
    raise IngestError(where, "must be a number")


def record_from_dict(data: Mapping) -> PaperRecord:
    contributions = []
    for ci, c in enumerate(data.get("contributions", [])):
        where = f"contributions[{ci}]"
        quality = [
            QualityResultRecord(
                metric=q["metric"],
                score=_as_decimal(q["score"], f"{where}.quality_results[{qi}].score"),
                evaluation_items=[
                    EvaluationItemRecord(label=i["label"], granularity=i["granularity"])
                    for i in q.get("evaluation_items", [])
                ],
            )
            for qi, q in enumerate(c.get("quality_results", []))
        ]
        leaderboards = [
            LeaderboardRecord(
                model_name=l["model_name"],
                model_code_url=l.get("model_code_url"),
                metric=l["metric"],
                score=_as_decimal(l["score"], f"{where}.leaderboards[{li}].score"),
            )
            for li, l in enumerate(c.get("leaderboards", []))
        ]
        contributions.append(
            ContributionRecord(
                name=c.get("name", ""),
                research_problems=list(c.get("research_problems", [])),
                metadata=dict(c.get("metadata", {})),
                statistics=dict(c.get("statistics", {})),
                quality_results=quality,
                leaderboards=leaderboards,
                entity_types=list(c.get("entity_types", [])),
                same_as=list(c.get("same_as", [])),
            )
        )
    try:
        year = int(data["publication_year"])
    except (KeyError, TypeError, ValueError):
        raise IngestError("publication_year", "missing or not an integer") from None
    return PaperRecord(
        title=data.get("title", ""),
        authors=list(data.get("authors", [])),
        publication_year=year,
        doi=data.get("doi"),
        research_field=data.get("research_field", ""),
        contributions=contributions,
    )


def load_ingest_document(text: str) -> IngestDocument:
    """Parse an ingestion file: {"papers": [...], "comparisons": [...]?}."""
    try:
        data = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise IngestError("document", f"not valid JSON: {exc}") from None
    if not isinstance(data, Mapping) or "papers" not in data:
        raise IngestError("papers", 'ingestion documents need a top-level "papers" list')
    papers = [record_from_dict(p) for p in data["papers"]]
    comparisons = [
        ComparisonDecl(
            id=c["id"],
            label=c.get("label", c["id"]),
            contributions=list(c.get("contributions", [])),
        )
        for c in data.get("comparisons", [])
    ]
    return IngestDocument(papers=papers, comparisons=comparisons)
