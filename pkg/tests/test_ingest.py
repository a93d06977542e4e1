from __future__ import annotations

import random
from decimal import Decimal

import pytest

from orkgdk import namespaces as ns
from orkgdk import templates as tpl
from orkgdk.ingest import (
    AlreadyPublishedError,
    ContributionRecord,
    EvaluationItemRecord,
    IdMinter,
    IngestError,
    LeaderboardRecord,
    NotFoundError,
    PaperRecord,
    Provenance,
    QualityResultRecord,
    equivalence_class,
    export_published,
    ingest_paper,
    link_same_as,
    load_ingest_document,
    local_registrar,
    publish,
    published_metadata,
    read_metadata_section,
    same_as_classes,
    split_published,
)
from orkgdk.rdf import Graph, ImmutablePublishedError, Iri, Literal, Triple, TYPE, LABEL, cls, prop, res, schema
from orkgdk.store import apply_document
from orkgdk.turtle import serialize_turtle

from .conftest import COMPARISON_ROOT, FIXED_PROVENANCE, build_fixture_graph, contribution_named
from .generators import random_links
from .oracles import UnionFind, closure_by_fixpoint


def minimal_record(name: str = "MiniCorpus") -> PaperRecord:
    return PaperRecord(
        title=f"A paper introducing {name}",
        authors=["A. Author"],
        publication_year=2019,
        research_field="Natural language processing",
        contributions=[
            ContributionRecord(name=name, research_problems=["Relation extraction"])
        ],
    )


# -- minting -------------------------------------------------------------------


def test_mint_sequence_starts_at_configured_counter():
    minter = IdMinter(start=1)
    assert minter.resource() == res("R1")
    assert minter.mint("property") == prop("P1")  # counters are per kind
    assert minter.resource() == res("R2")
    minter5 = IdMinter(start=5)
    assert minter5.resource() == res("R5")


def test_consecutive_mints_differ():
    minter = IdMinter()
    assert minter.resource() != minter.resource()


def test_minter_from_graph_skips_existing_ids(fixture_graph):
    minter = IdMinter.from_graph(fixture_graph)
    fresh = minter.resource()
    assert not fixture_graph.match(fresh, None, None)
    assert not fixture_graph.match(None, None, fresh)


# -- ingest_paper ----------------------------------------------------------------


def test_minimal_record_is_dual_typed():
    g = Graph()
    result = ingest_paper(minimal_record(), g, FIXED_PROVENANCE, IdMinter())
    (c,) = result.contributions
    types = [t.object for t in g.match(c, TYPE, None)]
    assert types == sorted(
        [cls("Contribution"), cls("Dataset")], key=lambda x: x.sort_key()
    )
    assert len(types) == 2


def test_two_research_problems_share_the_subject():
    record = minimal_record("TwoProblems")
    record.contributions[0].research_problems = [
        "Relation extraction",
        "Coreference resolution",
    ]
    g = Graph()
    result = ingest_paper(record, g, FIXED_PROVENANCE, IdMinter())
    (c,) = result.contributions
    links = g.match(c, prop("P32"), None)
    assert len(links) == 2
    labels = {
        g.value(t.object, LABEL).lexical for t in links  # type: ignore[union-attr]
    }
    assert labels == {"Relation extraction", "Coreference resolution"}


def test_research_problems_deduplicate_by_exact_label():
    g = Graph()
    minter = IdMinter()
    ingest_paper(minimal_record("A"), g, FIXED_PROVENANCE, minter)
    ingest_paper(minimal_record("B"), g, FIXED_PROVENANCE, minter)
    problems = g.match(None, TYPE, cls("ResearchProblem"))
    assert len(problems) == 1  # both papers share "Relation extraction"


def test_empty_contributions_rejected():
    record = minimal_record()
    record.contributions = []
    with pytest.raises(IngestError) as err:
        ingest_paper(record, Graph(), FIXED_PROVENANCE, IdMinter())
    assert err.value.field == "contributions"


@pytest.mark.parametrize(
    "mutate,field",
    [
        (lambda r: setattr(r, "title", ""), "title"),
        (lambda r: setattr(r, "publication_year", 1840), "publication_year"),
        (lambda r: setattr(r.contributions[0], "name", ""), "contributions[0].name"),
        (
            lambda r: r.contributions[0].statistics.update({"number_of_moons": 1}),
            "contributions[0].statistics.number_of_moons",
        ),
        (
            lambda r: r.contributions[0].metadata.update({"colour": "blue"}),
            "contributions[0].metadata.colour",
        ),
        (
            lambda r: r.contributions[0].quality_results.append(
                QualityResultRecord(
                    metric="IAA",
                    score=Decimal("0.5"),
                    evaluation_items=[EvaluationItemRecord("x", "galaxies")],
                )
            ),
            "contributions[0].quality_results[0].evaluation_items[0].granularity",
        ),
        (
            lambda r: r.contributions[0].leaderboards.append(
                LeaderboardRecord(model_name="M", metric="F1-score", score=Decimal("NaN"))
            ),
            "contributions[0].leaderboards[0].score",
        ),
    ],
)
def test_record_invariants_name_the_field(mutate, field):
    record = minimal_record()
    mutate(record)
    with pytest.raises(IngestError) as err:
        ingest_paper(record, Graph(), FIXED_PROVENANCE, IdMinter())
    assert err.value.field == field


def test_ingest_autofills_schema_name():
    g = Graph()
    result = ingest_paper(minimal_record("AutoName"), g, FIXED_PROVENANCE, IdMinter())
    (c,) = result.contributions
    assert g.objects(c, schema("name")) == [Literal("AutoName")]


def test_every_contribution_conforms_after_ingest(fixture_graph):
    registry = tpl.builtin_templates()
    dataset = tpl.registry_map(registry)[tpl.DATASET_TEMPLATE_ID]
    for t in fixture_graph.match(None, TYPE, cls("Dataset")):
        report = tpl.validate(fixture_graph, t.subject, dataset, registry)
        assert report.conforms, (t.subject, report.violations)


def test_ingest_twice_with_dedupe_is_idempotent(fixture_document):
    g1 = Graph()
    apply_document(g1, fixture_document, FIXED_PROVENANCE, IdMinter(start=1))
    g2 = Graph()
    minter = IdMinter(start=1)
    apply_document(g2, fixture_document, FIXED_PROVENANCE, minter)
    apply_document(g2, fixture_document, FIXED_PROVENANCE, minter)
    assert g1 == g2


def test_reingest_returns_existing_roots():
    g = Graph()
    minter = IdMinter()
    first = ingest_paper(minimal_record(), g, FIXED_PROVENANCE, minter)
    second = ingest_paper(minimal_record(), g, FIXED_PROVENANCE, minter)
    assert first.paper == second.paper
    assert first.contributions == second.contributions


def test_double_run_exports_are_byte_identical(fixture_document):
    outs = []
    for _ in range(2):
        g = Graph()
        apply_document(g, fixture_document, FIXED_PROVENANCE, IdMinter(start=1))
        outs.append(serialize_turtle(g))
    assert outs[0] == outs[1]


def test_quality_results_become_nested_instances(fixture_graph):
    c = contribution_named(fixture_graph, "SciER-Bench")
    (node,) = fixture_graph.objects(c, prop("hasQualityResult"))
    assert Triple(node, TYPE, cls("DataCentricResult")) in fixture_graph
    items = fixture_graph.objects(node, prop("P71154"))
    assert len(items) == 1
    assert fixture_graph.value(items[0], prop("granularity")) == Literal("entities")
    metric = fixture_graph.value(node, prop("metric"))
    assert Triple(metric, TYPE, Iri(ns.QUDT + "Quantity")) in fixture_graph


def test_metric_resources_deduplicate(fixture_graph):
    metrics = fixture_graph.match(None, TYPE, Iri(ns.QUDT + "Quantity"))
    labels = [fixture_graph.value(t.subject, LABEL).lexical for t in metrics]
    assert len(labels) == len(set(labels))
    assert labels.count("F1-score") == 1


# -- same-as closure ---------------------------------------------------------------


def test_single_link_forms_one_class():
    g = Graph()
    link_same_as(g, prop("P_local"), schema("assesses"))
    assert equivalence_class(g, prop("P_local").iri) == frozenset(
        {prop("P_local").iri, schema("assesses").iri}
    )


def test_chain_is_transitive():
    g = Graph()
    a, b, c = res("A"), res("B"), res("C")
    link_same_as(g, a, b)
    link_same_as(g, b, c)
    assert equivalence_class(g, a.iri) == frozenset({a.iri, b.iri, c.iri})


def test_closure_matches_union_find_and_fixpoint():
    rng = random.Random(99)
    for _ in range(30):
        links = random_links(rng)
        g = Graph()
        for a, b in links:
            link_same_as(g, Iri(a), Iri(b))
        got = same_as_classes(g)
        uf = UnionFind()
        for a, b in links:
            uf.union(a, b)
        assert got == uf.classes() == closure_by_fixpoint(links)


# -- publishing ----------------------------------------------------------------------


def test_publish_fixture_comparison():
    g = build_fixture_graph()
    pid = publish(g, COMPARISON_ROOT, FIXED_PROVENANCE)
    assert pid.value == "10.0000/orkgdk.R280270"
    assert Triple(COMPARISON_ROOT, schema("identifier"), Literal(pid.value)) in g
    meta = published_metadata(g, COMPARISON_ROOT)
    assert meta == {
        "id": COMPARISON_ROOT.iri,
        "persistent_id": "10.0000/orkgdk.R280270",
        "created_at": FIXED_PROVENANCE.created_at,
        "created_by": FIXED_PROVENANCE.created_by,
        "license": ns.CC_BY_SA,
    }


def test_publish_twice_raises():
    g = build_fixture_graph()
    publish(g, COMPARISON_ROOT, FIXED_PROVENANCE)
    with pytest.raises(AlreadyPublishedError):
        publish(g, COMPARISON_ROOT, FIXED_PROVENANCE)


def test_mutating_published_subgraph_raises():
    g = build_fixture_graph()
    publish(g, COMPARISON_ROOT, FIXED_PROVENANCE)
    member = contribution_named(g, "ScholarSpan")
    with pytest.raises(ImmutablePublishedError):
        g.insert(Triple(member, LABEL, Literal("renamed")))


def test_publish_missing_root_raises():
    with pytest.raises(NotFoundError):
        publish(Graph(), res("R404"), FIXED_PROVENANCE)


def test_publish_enforces_share_alike_license():
    g = build_fixture_graph()
    tainted = Provenance(
        created_at=FIXED_PROVENANCE.created_at,
        created_by="x",
        license="https://example.org/all-rights-reserved",
    )
    with pytest.raises(IngestError):
        publish(g, COMPARISON_ROOT, tainted)


def test_published_state_survives_turtle_round_trip():
    from orkgdk.turtle import parse_turtle

    g = build_fixture_graph()
    publish(g, COMPARISON_ROOT, FIXED_PROVENANCE)
    reloaded = parse_turtle(serialize_turtle(g))
    assert reloaded.published_id(COMPARISON_ROOT.iri) == "10.0000/orkgdk.R280270"
    member = contribution_named(reloaded, "ScholarSpan")
    with pytest.raises(ImmutablePublishedError):
        reloaded.insert(Triple(member, LABEL, Literal("renamed")))


def test_metadata_and_data_sections_are_separable():
    g = build_fixture_graph()
    publish(g, COMPARISON_ROOT, FIXED_PROVENANCE)
    meta, data = split_published(g, COMPARISON_ROOT)
    assert len(meta) == 4  # identifier + created_at + created_by + license
    assert len(meta) + len(data) == len(g)
    text = export_published(g, COMPARISON_ROOT)
    header = read_metadata_section(text)
    assert header == meta
    assert not header.match(None, prop("compareContribution"), None)
    # the full document still parses to the whole graph
    from orkgdk.turtle import parse_turtle

    assert parse_turtle(text) == g


def test_registrar_is_pluggable():
    g = build_fixture_graph()
    pid = publish(g, COMPARISON_ROOT, FIXED_PROVENANCE, registrar=lambda root: "10.9999/custom")
    assert pid.value == "10.9999/custom"
    assert local_registrar(res("R7")) == "10.0000/orkgdk.R7"


def test_provenance_completeness_on_published_root():
    g = build_fixture_graph()
    publish(g, COMPARISON_ROOT, FIXED_PROVENANCE)
    assert g.value(COMPARISON_ROOT, prop("createdAt")) is not None
    assert g.value(COMPARISON_ROOT, prop("createdBy")) is not None
    assert g.value(COMPARISON_ROOT, prop("license")) == Iri(ns.CC_BY_SA)


# -- document loading -----------------------------------------------------------------


def test_load_document_parses_scores_as_decimal(fixture_document):
    score = fixture_document.papers[0].contributions[0].quality_results[0].score
    assert score == Decimal("0.81")
    assert isinstance(score, Decimal)


def test_document_requires_papers_key():
    with pytest.raises(IngestError):
        load_ingest_document('{"nope": []}')


def test_document_rejects_bad_json():
    with pytest.raises(IngestError):
        load_ingest_document("{")


def test_unknown_comparison_contribution_name(fixture_document):
    fixture_document.comparisons[0].contributions.append("NoSuchDataset")
    with pytest.raises(IngestError):
        apply_document(Graph(), fixture_document, FIXED_PROVENANCE, IdMinter())
