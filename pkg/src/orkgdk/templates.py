"""Templates: recurring subgraph property patterns and their validation.

A template names a target class and an ordered list of property shapes
(cardinality plus a range that is either a literal datatype, a resource
class, or a nested template). Validation walks a root resource against a
template and collects every violation (no fail-fast), so reports can drive
the CLI and UI directly.

Five templates ship built in: the generic dataset-metadata template (19
schema.org properties), a statistics bundle (9 integer counters), the
data-centric result / evaluation item pair for annotation-quality records,
and the leaderboard template for performance benchmarks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from . import namespaces as ns
from .rdf import Graph, Iri, Literal, Term, Triple, TYPE, LABEL

# Violation codes.
MISSING_TYPE = "MissingType"
CARDINALITY_LOW = "CardinalityLow"
CARDINALITY_HIGH = "CardinalityHigh"
WRONG_DATATYPE = "WrongDatatype"
WRONG_CLASS = "WrongClass"
NESTED_NONCONFORM = "NestedNonconform"

MAX_NESTING_DEPTH = 8

RANGE_LITERAL = "literal"
RANGE_RESOURCE = "resource"
RANGE_NESTED = "nested"


class TemplateError(ValueError):
    """Invalid template definition."""


class TemplateRegistryError(LookupError):
    """A nested template reference cannot be resolved (distinct from a violation)."""


class DepthExceededError(TemplateRegistryError):
    """Nested validation recursed past the depth bound."""


class TemplateStructureError(ValueError):
    """A template description in a graph is missing a required field."""


@dataclass(frozen=True)
class ShapeRange:
    kind: str  # literal | resource | nested
    value: str  # datatype IRI | class IRI | template IRI

    def __post_init__(self) -> None:
        if self.kind not in (RANGE_LITERAL, RANGE_RESOURCE, RANGE_NESTED):
            raise TemplateError(f"unknown range kind {self.kind!r}")


@dataclass(frozen=True)
class PropertyShape:
    property: str
    label: str
    range: ShapeRange
    min_count: int = 0
    max_count: int | None = None  # None = unbounded

    def __post_init__(self) -> None:
        if self.min_count < 0:
            raise TemplateError("min_count must be non-negative")
        if self.max_count is not None:
            if self.max_count < 1:
                raise TemplateError("max_count must be positive")
            if self.min_count > self.max_count:
                raise TemplateError("min_count exceeds max_count")


@dataclass(frozen=True)
class Template:
    id: str
    label: str
    target_class: str
    shapes: tuple[PropertyShape, ...]

    def __post_init__(self) -> None:
        if not self.shapes:
            raise TemplateError(f"template {self.id} has no shapes")
        props = [s.property for s in self.shapes]
        if len(props) != len(set(props)):
            raise TemplateError(f"duplicate shape properties in {self.id}")

    def shape_for(self, property_iri: str) -> PropertyShape | None:
        for s in self.shapes:
            if s.property == property_iri:
                return s
        return None


@dataclass(frozen=True)
class Violation:
    node: str
    property: str
    code: str
    message: str


@dataclass(frozen=True)
class ConformanceReport:
    root: str
    template: str
    conforms: bool
    violations: tuple[Violation, ...]

    @classmethod
    def build(cls, root: str, template: str, violations: Sequence[Violation]) -> "ConformanceReport":
        vs = tuple(violations)
        return cls(root=root, template=template, conforms=not vs, violations=vs)

    def to_dict(self) -> dict:
        return {
            "root": self.root,
            "template": self.template,
            "conforms": self.conforms,
            "violations": [
                {"node": v.node, "property": v.property, "code": v.code, "message": v.message}
                for v in self.violations
            ],
        }


# -- built-in templates ------------------------------------------------------

DATASET_TEMPLATE_ID = ns.ORKGT + "R178304"
STATISTICS_TEMPLATE_ID = ns.ORKGT + "R220250"
RESULT_TEMPLATE_ID = ns.ORKGT + "R220939"
EVALUATION_ITEM_TEMPLATE_ID = ns.ORKGT + "R221194"
LEADERBOARD_TEMPLATE_ID = ns.ORKGT + "R107801"

# (local schema.org name, label, datatype). schema:name is the only required
# field; multiplicity is unbounded unless a template says otherwise.
_DATASET_FIELDS: tuple[tuple[str, str, str], ...] = (
    ("name", "name", ns.XSD_STRING),
    ("alternateName", "alternate name", ns.XSD_STRING),
    ("assesses", "assesses", ns.XSD_STRING),
    ("description", "description", ns.XSD_STRING),
    ("url", "URL", ns.XSD_ANY_URI),
    ("citation", "citation", ns.XSD_STRING),
    ("creator", "creator", ns.XSD_STRING),
    ("dateCreated", "date created", ns.XSD_DATE),
    ("datePublished", "date published", ns.XSD_DATE),
    ("distribution", "distribution", ns.XSD_ANY_URI),
    ("encodingFormat", "encoding format", ns.XSD_STRING),
    ("identifier", "identifier", ns.XSD_STRING),
    ("inLanguage", "in language", ns.XSD_STRING),
    ("keywords", "keywords", ns.XSD_STRING),
    ("license", "license", ns.XSD_STRING),
    ("measurementTechnique", "measurement technique", ns.XSD_STRING),
    ("sameAs", "same as", ns.XSD_ANY_URI),
    ("size", "size", ns.XSD_STRING),
    ("version", "version", ns.XSD_STRING),
)

# (property local name, json key, label); all integer counters, at most one each.
_STATISTIC_FIELDS: tuple[tuple[str, str, str], ...] = (
    ("numberOfDocuments", "number_of_documents", "number of documents"),
    ("numberOfSentences", "number_of_sentences", "number of sentences"),
    ("numberOfTokens", "number_of_tokens", "number of tokens"),
    ("numberOfEntities", "number_of_entities", "number of entities"),
    ("numberOfRelations", "number_of_relations", "number of relations"),
    ("numberOfEntityTypes", "number_of_entity_types", "number of entity types"),
    ("numberOfRelationTypes", "number_of_relation_types", "number of relation types"),
    ("numberOfAnnotators", "number_of_annotators", "number of annotators"),
    ("numberOfAnnotatedItems", "number_of_annotated_items", "number of annotated items"),
)

METADATA_KEYS = {local: (ns.SCHEMA + local, label, dt) for local, label, dt in _DATASET_FIELDS}
STATISTIC_KEYS = {key: (ns.PRED + local, label) for local, key, label in _STATISTIC_FIELDS}


def _dataset_template() -> Template:
    shapes = tuple(
        PropertyShape(
            property=ns.SCHEMA + local,
            label=label,
            range=ShapeRange(RANGE_LITERAL, datatype),
            min_count=1 if local == "name" else 0,
        )
        for local, label, datatype in _DATASET_FIELDS
    )
    return Template(DATASET_TEMPLATE_ID, "Dataset metadata", ns.CLASS + "Dataset", shapes)


def _statistics_template() -> Template:
    shapes = tuple(
        PropertyShape(
            property=ns.PRED + local,
            label=label,
            range=ShapeRange(RANGE_LITERAL, ns.XSD_INTEGER),
            min_count=0,
            max_count=1,
        )
        for local, _key, label in _STATISTIC_FIELDS
    )
    return Template(STATISTICS_TEMPLATE_ID, "Statistics", ns.CLASS + "Dataset", shapes)


def _result_template() -> Template:
    shapes = (
        PropertyShape(
            property=ns.PRED + "metric",
            label="metric",
            range=ShapeRange(RANGE_RESOURCE, ns.QUDT + "Quantity"),
            min_count=1,
            max_count=1,
        ),
        PropertyShape(
            property=ns.PRED + "score",
            label="score",
            range=ShapeRange(RANGE_LITERAL, ns.XSD_DECIMAL),
            min_count=1,
            max_count=1,
        ),
        PropertyShape(
            property=ns.PRED + "P71154",
            label="has evaluation item",
            range=ShapeRange(RANGE_NESTED, EVALUATION_ITEM_TEMPLATE_ID),
            min_count=0,
        ),
    )
    return Template(
        RESULT_TEMPLATE_ID, "Data-centric result", ns.CLASS + "DataCentricResult", shapes
    )


def _evaluation_item_template() -> Template:
    shapes = (
        PropertyShape(
            property=ns.RDFS + "label",
            label="label",
            range=ShapeRange(RANGE_LITERAL, ns.XSD_STRING),
            min_count=1,
            max_count=1,
        ),
        PropertyShape(
            property=ns.PRED + "granularity",
            label="granularity",
            range=ShapeRange(RANGE_LITERAL, ns.XSD_STRING),
            min_count=1,
            max_count=1,
        ),
    )
    return Template(
        EVALUATION_ITEM_TEMPLATE_ID, "Evaluation item", ns.CLASS + "EvaluationItem", shapes
    )


def _leaderboard_template() -> Template:
    shapes = (
        PropertyShape(
            property=ns.PRED + "modelName",
            label="model name",
            range=ShapeRange(RANGE_LITERAL, ns.XSD_STRING),
            min_count=1,
            max_count=1,
        ),
        PropertyShape(
            property=ns.PRED + "modelCodeUrl",
            label="model code URL",
            range=ShapeRange(RANGE_LITERAL, ns.XSD_ANY_URI),
            min_count=0,
            max_count=1,
        ),
        PropertyShape(
            property=ns.PRED + "metric",
            label="metric",
            range=ShapeRange(RANGE_RESOURCE, ns.QUDT + "Quantity"),
            min_count=1,
            max_count=1,
        ),
        PropertyShape(
            property=ns.PRED + "score",
            label="score",
            range=ShapeRange(RANGE_LITERAL, ns.XSD_DECIMAL),
            min_count=1,
            max_count=1,
        ),
    )
    return Template(LEADERBOARD_TEMPLATE_ID, "Leaderboard", ns.CLASS + "Leaderboard", shapes)


def builtin_templates() -> list[Template]:
    """The five templates the toolkit ships with."""
    return [
        _dataset_template(),
        _statistics_template(),
        _result_template(),
        _evaluation_item_template(),
        _leaderboard_template(),
    ]


def registry_map(registry: Iterable[Template]) -> dict[str, Template]:
    return {t.id: t for t in registry}


# -- validation --------------------------------------------------------------


def _check_registry(template: Template, registry: Mapping[str, Template]) -> None:
    """Every nested reference transitively reachable must resolve."""
    seen: set[str] = set()
    stack = [template]
    while stack:
        t = stack.pop()
        if t.id in seen:
            continue
        seen.add(t.id)
        for shape in t.shapes:
            if shape.range.kind == RANGE_NESTED:
                nested = registry.get(shape.range.value)
                if nested is None:
                    raise TemplateRegistryError(
                        f"template {t.id} references unknown template {shape.range.value}"
                    )
                stack.append(nested)


def validate(
    graph: Graph,
    root: Iri | str,
    template: Template,
    registry: Sequence[Template] | Mapping[str, Template],
) -> ConformanceReport:
    """Check a root resource against a template, collecting all violations.

    Raises TemplateRegistryError for dangling nested references and
    DepthExceededError when nested data recurses past the bound; both are
    registry-level failures, not conformance violations.
    """
    root_iri = root if isinstance(root, Iri) else Iri(root)
    reg = registry if isinstance(registry, Mapping) else registry_map(registry)
    if template.id not in reg:
        reg = dict(reg)
        reg[template.id] = template
    _check_registry(template, reg)
    return _validate(graph, root_iri, template, reg, depth=0)


def _validate(
    graph: Graph,
    root: Iri,
    template: Template,
    registry: Mapping[str, Template],
    depth: int,
) -> ConformanceReport:
    if depth > MAX_NESTING_DEPTH:
        raise DepthExceededError(
            f"nested validation exceeded depth {MAX_NESTING_DEPTH} at {root.iri}"
        )
    violations: list[Violation] = []
    target = Iri(template.target_class)
    if Triple(root, TYPE, target) not in graph:
        violations.append(
            Violation(
                node=root.iri,
                property=TYPE.iri,
                code=MISSING_TYPE,
                message=f"{root.iri} is not typed {template.target_class}",
            )
        )
    for shape in template.shapes:
        prop_iri = Iri(shape.property)
        objects = graph.objects(root, prop_iri)
        n = len(objects)
        if n < shape.min_count:
            violations.append(
                Violation(
                    node=root.iri,
                    property=shape.property,
                    code=CARDINALITY_LOW,
                    message=f"found {n} value(s) for {shape.label!r}, expected at least {shape.min_count}",
                )
            )
        if shape.max_count is not None and n > shape.max_count:
            violations.append(
                Violation(
                    node=root.iri,
                    property=shape.property,
                    code=CARDINALITY_HIGH,
                    message=f"found {n} value(s) for {shape.label!r}, expected at most {shape.max_count}",
                )
            )
        for obj in objects:
            violations.extend(_check_range(graph, root, shape, obj, registry, depth))
    return ConformanceReport.build(root.iri, template.id, violations)


def _check_range(
    graph: Graph,
    root: Iri,
    shape: PropertyShape,
    obj: Term,
    registry: Mapping[str, Template],
    depth: int,
) -> list[Violation]:
    kind = shape.range.kind
    if kind == RANGE_LITERAL:
        if not isinstance(obj, Literal):
            return [
                Violation(
                    root.iri,
                    shape.property,
                    WRONG_DATATYPE,
                    f"expected a literal of {shape.range.value}, found resource {obj.iri}",
                )
            ]
        if obj.datatype != shape.range.value:
            return [
                Violation(
                    root.iri,
                    shape.property,
                    WRONG_DATATYPE,
                    f"expected datatype {shape.range.value}, found {obj.datatype}",
                )
            ]
        return []
    if kind == RANGE_RESOURCE:
        if not isinstance(obj, Iri) or Triple(obj, TYPE, Iri(shape.range.value)) not in graph:
            found = obj.iri if isinstance(obj, Iri) else f"literal {obj.lexical!r}"
            return [
                Violation(
                    root.iri,
                    shape.property,
                    WRONG_CLASS,
                    f"expected a resource typed {shape.range.value}, found {found}",
                )
            ]
        return []
    # nested
    if not isinstance(obj, Iri):
        return [
            Violation(
                root.iri,
                shape.property,
                NESTED_NONCONFORM,
                f"expected a nested {shape.range.value} instance, found literal {obj.lexical!r}",
            )
        ]
    nested_template = registry[shape.range.value]
    child = _validate(graph, obj, nested_template, registry, depth + 1)
    if child.conforms:
        return []
    return [
        Violation(
            obj.iri,
            shape.property,
            NESTED_NONCONFORM,
            f"{obj.iri} has {len(child.violations)} violation(s) against {shape.range.value}",
        )
    ]


# -- template <-> graph ------------------------------------------------------

_P_TARGET_CLASS = Iri(ns.PRED + "targetClass")
_P_HAS_SHAPE = Iri(ns.PRED + "hasPropertyShape")
_P_ON_PROPERTY = Iri(ns.PRED + "onProperty")
_P_MIN_COUNT = Iri(ns.PRED + "minCount")
_P_MAX_COUNT = Iri(ns.PRED + "maxCount")
_P_DATATYPE = Iri(ns.PRED + "datatype")
_P_CLASS = Iri(ns.PRED + "class")
_P_NESTED = Iri(ns.PRED + "nestedTemplate")
_P_ORDER = Iri(ns.PRED + "shapeOrder")
_C_TEMPLATE = Iri(ns.CLASS + "Template")
_C_SHAPE = Iri(ns.CLASS + "PropertyShape")

_RANGE_PREDICATES = {
    RANGE_LITERAL: _P_DATATYPE,
    RANGE_RESOURCE: _P_CLASS,
    RANGE_NESTED: _P_NESTED,
}


def _shape_iri(template_id: str, index: int) -> Iri:
    return Iri(f"{template_id}.shape.{index}")


def template_to_graph(template: Template) -> Graph:
    """Describe a template as triples (shape nodes keep an explicit order)."""
    g = Graph()
    t = Iri(template.id)
    g.insert(Triple(t, TYPE, _C_TEMPLATE))
    g.insert(Triple(t, LABEL, Literal(template.label)))
    g.insert(Triple(t, _P_TARGET_CLASS, Iri(template.target_class)))
    for i, shape in enumerate(template.shapes):
        node = _shape_iri(template.id, i)
        g.insert(Triple(t, _P_HAS_SHAPE, node))
        g.insert(Triple(node, TYPE, _C_SHAPE))
        g.insert(Triple(node, _P_ON_PROPERTY, Iri(shape.property)))
        g.insert(Triple(node, LABEL, Literal(shape.label)))
        g.insert(Triple(node, _P_ORDER, Literal(str(i), ns.XSD_INTEGER)))
        g.insert(Triple(node, _P_MIN_COUNT, Literal(str(shape.min_count), ns.XSD_INTEGER)))
        if shape.max_count is not None:
            g.insert(Triple(node, _P_MAX_COUNT, Literal(str(shape.max_count), ns.XSD_INTEGER)))
        g.insert(Triple(node, _RANGE_PREDICATES[shape.range.kind], Iri(shape.range.value)))
    return g


def _require(graph: Graph, node: Iri, predicate: Iri, what: str) -> Term:
    value = graph.value(node, predicate)
    if value is None:
        raise TemplateStructureError(f"template description {node.iri} is missing {what}")
    return value


def graph_to_template(graph: Graph, template_id: Iri | str) -> Template:
    """Reconstruct a Template from its graph description (lossless)."""
    t = template_id if isinstance(template_id, Iri) else Iri(template_id)
    if Triple(t, TYPE, _C_TEMPLATE) not in graph:
        raise TemplateStructureError(f"{t.iri} is not described as a template")
    label = _require(graph, t, LABEL, "rdfs:label")
    target = _require(graph, t, _P_TARGET_CLASS, "pred:targetClass")
    if not isinstance(target, Iri):
        raise TemplateStructureError(f"{t.iri} target class must be an IRI")

    entries: list[tuple[int, PropertyShape]] = []
    for shape_node in graph.objects(t, _P_HAS_SHAPE):
        if not isinstance(shape_node, Iri):
            raise TemplateStructureError(f"{t.iri} has a literal property shape")
        order_term = _require(graph, shape_node, _P_ORDER, "pred:shapeOrder")
        prop_term = _require(graph, shape_node, _P_ON_PROPERTY, "pred:onProperty")
        label_term = _require(graph, shape_node, LABEL, "rdfs:label")
        min_term = _require(graph, shape_node, _P_MIN_COUNT, "pred:minCount")
        max_term = graph.value(shape_node, _P_MAX_COUNT)
        ranges = [
            (kind, graph.value(shape_node, pred))
            for kind, pred in _RANGE_PREDICATES.items()
            if graph.value(shape_node, pred) is not None
        ]
        if len(ranges) != 1:
            raise TemplateStructureError(
                f"shape {shape_node.iri} must carry exactly one range, found {len(ranges)}"
            )
        kind, range_value = ranges[0]
        if not isinstance(prop_term, Iri) or not isinstance(range_value, Iri):
            raise TemplateStructureError(f"shape {shape_node.iri} has a malformed range")
        shape = PropertyShape(
            property=prop_term.iri,
            label=label_term.lexical if isinstance(label_term, Literal) else "",
            range=ShapeRange(kind, range_value.iri),
            min_count=int(min_term.lexical) if isinstance(min_term, Literal) else 0,
            max_count=int(max_term.lexical) if isinstance(max_term, Literal) else None,
        )
        entries.append((int(order_term.lexical) if isinstance(order_term, Literal) else 0, shape))
    entries.sort(key=lambda e: e[0])
    return Template(
        id=t.iri,
        label=label.lexical if isinstance(label, Literal) else "",
        target_class=target.iri,
        shapes=tuple(shape for _, shape in entries),
    )


# -- declarative JSON form ----------------------------------------------------


def template_to_dict(template: Template) -> dict:
    return {
        "id": template.id,
        "label": template.label,
        "target_class": template.target_class,
        "shapes": [
            {
                "property": s.property,
                "label": s.label,
                "min_count": s.min_count,
                "max_count": s.max_count,
                "range": {"kind": s.range.kind, "value": s.range.value},
            }
            for s in template.shapes
        ],
    }


def template_from_dict(data: Mapping) -> Template:
    try:
        shapes = tuple(
            PropertyShape(
                property=s["property"],
                label=s["label"],
                min_count=int(s.get("min_count", 0)),
                max_count=None if s.get("max_count") is None else int(s["max_count"]),
                range=ShapeRange(s["range"]["kind"], s["range"]["value"]),
            )
            for s in data["shapes"]
        )
        return Template(
            id=data["id"],
            label=data["label"],
            target_class=data["target_class"],
            shapes=shapes,
        )
    except KeyError as exc:
        raise TemplateStructureError(f"template document is missing field {exc.args[0]!r}") from None


def template_to_json(template: Template) -> str:
    return json.dumps(template_to_dict(template), indent=2, sort_keys=False)


def template_from_json(text: str) -> Template:
    return template_from_dict(json.loads(text))
