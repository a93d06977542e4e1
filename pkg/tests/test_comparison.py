from __future__ import annotations

import json
from decimal import Decimal

import pytest

from orkgdk import namespaces as ns
from orkgdk.comparison import (
    FilterSpec,
    NotFoundError,
    RequireClause,
    TypeViolationError,
    build_comparison,
    create_comparison,
    export_table,
    filter_table,
    table_from_dict,
    table_to_dict,
    timeline,
)
from orkgdk.ingest import link_same_as, publish, same_as_classes
from orkgdk.rdf import Graph, Iri, Literal, Triple, TYPE, LABEL, cls, prop, res, schema

from .conftest import COMPARISON_ROOT, FIXED_PROVENANCE, build_fixture_graph, contribution_named


def _single_contribution_graph() -> tuple[Graph, Iri]:
    g = Graph()
    c = res("C1")
    g.insert(Triple(c, TYPE, cls("Dataset")))
    g.insert(Triple(c, LABEL, Literal("Solo")))
    g.insert(Triple(c, schema("description"), Literal("one contribution")))
    root = create_comparison(g, res("CMP1"), "solo comparison", [c])
    return g, root


def test_single_contribution_three_rows():
    g, root = _single_contribution_graph()
    table = build_comparison(g, root)
    assert len(table.columns) == 1
    assert len(table.rows) == 3  # rdf:type, rdfs:label, schema:description
    assert {r.property for r in table.rows} == {
        ns.RDF + "type",
        ns.RDFS + "label",
        ns.SCHEMA + "description",
    }


def test_missing_root_raises_not_found(fixture_graph):
    with pytest.raises(NotFoundError):
        build_comparison(fixture_graph, res("R999999"))


def test_untyped_member_raises_type_violation():
    g = Graph()
    c = res("C1")
    g.insert(Triple(c, LABEL, Literal("untyped")))
    root = create_comparison(g, res("CMP"), "broken", [c])
    with pytest.raises(TypeViolationError) as err:
        build_comparison(g, root)
    assert err.value.member == c.iri


def test_fixture_rows_match_brute_force_union(fixture_graph):
    table = build_comparison(fixture_graph, COMPARISON_ROOT)
    assert len(table.columns) == 5
    members = [Iri(c.iri) for c in table.columns]
    union: set[str] = set()
    for m in members:
        union |= {t.predicate.iri for t in fixture_graph.match(m, None, None)}
    closure = same_as_classes(fixture_graph)
    merged = {frozenset(closure.get(p, frozenset({p})) & union) for p in union}
    assert len(table.rows) == len(merged)
    assert {frozenset(r.properties) for r in table.rows} == merged


def test_cells_contain_exactly_graph_values(fixture_graph):
    table = build_comparison(fixture_graph, COMPARISON_ROOT)
    for row in table.rows:
        for column, cell in zip(table.columns, row.cells):
            terms = {
                term
                for p in row.properties
                for term in fixture_graph.objects(Iri(column.iri), Iri(p))
            }
            # one rendered value per distinct graph value, nothing invented
            assert len(cell) == len(terms)


def test_same_as_merges_rows():
    g = Graph()
    local = prop("P_localAssesses")
    for i, (name, use_local) in enumerate([("A", True), ("B", False)], start=1):
        c = res(f"C{i}")
        g.insert(Triple(c, TYPE, cls("Dataset")))
        g.insert(Triple(c, LABEL, Literal(name)))
        predicate = local if use_local else schema("assesses")
        g.insert(Triple(c, predicate, Literal(f"task-{name}")))
    root = create_comparison(g, res("CMP"), "merge", [res("C1"), res("C2")])
    before = build_comparison(g, root)
    assert len(before.rows) == 4  # type, label, and the two unlinked properties
    link_same_as(g, local, schema("assesses"))
    after = build_comparison(g, root)
    assert len(after.rows) == 3
    merged = next(r for r in after.rows if local.iri in r.properties)
    assert set(merged.properties) == {local.iri, schema("assesses").iri}
    assert all(cell for cell in merged.cells)  # both columns filled


def test_row_order_is_coverage_then_label(fixture_graph):
    table = build_comparison(fixture_graph, COMPARISON_ROOT)
    keys = [(-sum(1 for c in r.cells if c), r.label, r.property) for r in table.rows]
    assert keys == sorted(keys)


def test_compound_cells_render_label_score_metric(fixture_graph):
    table = build_comparison(fixture_graph, COMPARISON_ROOT)
    row = next(r for r in table.rows if r.label == "has leaderboard")
    col = [c.iri for c in table.columns].index(
        contribution_named(fixture_graph, "ClaimCheck-Sci").iri
    )
    (value,) = row.cells[col]
    assert value.text == "ClaimBERT: 0.83 (F1-score)"
    assert value.number == Decimal("0.83")
    assert value.metric == "F1-score"


def test_empty_spec_is_identity(fixture_graph):
    table = build_comparison(fixture_graph, COMPARISON_ROOT)
    filtered = filter_table(table, FilterSpec())
    assert table_to_dict(filtered) == table_to_dict(table)
    assert filtered is not table


def test_f1_threshold_filter_matches_linear_scan(fixture_graph):
    table = build_comparison(fixture_graph, COMPARISON_ROOT)
    spec = FilterSpec(require=(RequireClause("F1-score", ">", "0.7"),))
    filtered = filter_table(table, spec)
    expected = set()
    for t in fixture_graph.match(None, prop("hasLeaderboard"), None):
        score = fixture_graph.value(t.object, prop("score"))
        metric = fixture_graph.value(t.object, prop("metric"))
        metric_label = fixture_graph.value(metric, LABEL)
        if metric_label == Literal("F1-score") and Decimal(score.lexical) > Decimal("0.7"):
            expected.add(t.subject.iri)
    assert {c.iri for c in filtered.columns} == expected
    assert len(filtered.columns) == 3
    # the original table is untouched
    assert len(table.columns) == 5


def test_year_range_keeps_all_fixture_columns(fixture_graph):
    table = build_comparison(fixture_graph, COMPARISON_ROOT)
    filtered = filter_table(table, FilterSpec(year_range=(2011, 2022)))
    assert [c.iri for c in filtered.columns] == [c.iri for c in table.columns]
    narrowed = filter_table(table, FilterSpec(year_range=(2014, 2020)))
    assert {c.label for c in narrowed.columns} == {
        "AnnoGraph-SciIE",
        "ScholarSpan",
        "LabLeader-IE",
    }


def test_hide_properties_drops_rows(fixture_graph):
    table = build_comparison(fixture_graph, COMPARISON_ROOT)
    filtered = filter_table(table, FilterSpec(hide_properties=frozenset({"description"})))
    assert len(filtered.rows) == len(table.rows) - 1
    assert all(r.label != "description" for r in filtered.rows)


def test_filter_never_grows_the_table(fixture_graph):
    table = build_comparison(fixture_graph, COMPARISON_ROOT)
    specs = [
        FilterSpec(require=(RequireClause("labeled entity type", "=", "Method"),)),
        FilterSpec(hide_properties=frozenset({"URL", "version"})),
        FilterSpec(year_range=(2015, 2016)),
        FilterSpec(require=(RequireClause("nonexistent", ">", "1"),)),
    ]
    for spec in specs:
        filtered = filter_table(table, spec)
        assert len(filtered.rows) <= len(table.rows)
        assert len(filtered.columns) <= len(table.columns)


def test_numeric_comparator_on_text_records_warning(fixture_graph):
    table = build_comparison(fixture_graph, COMPARISON_ROOT)
    spec = FilterSpec(require=(RequireClause("description", ">", "0.5"),))
    filtered = filter_table(table, spec)
    assert filtered.columns == []
    assert filtered.warnings
    assert "description" in filtered.warnings[0]


def test_json_round_trip_is_lossless(fixture_graph):
    g = build_fixture_graph()
    publish(g, COMPARISON_ROOT, FIXED_PROVENANCE)
    table = build_comparison(g, COMPARISON_ROOT)
    data = json.loads(export_table(table, "json").decode("utf-8"))
    assert table_from_dict(data) == table


def test_exports_are_deterministic(fixture_graph):
    table = build_comparison(fixture_graph, COMPARISON_ROOT)
    for fmt in ("json", "csv", "html"):
        assert export_table(table, fmt) == export_table(table, fmt)
    assert export_table(table, "ttl", graph=fixture_graph) == export_table(
        table, "ttl", graph=fixture_graph
    )


def test_csv_export_layout():
    g, root = _single_contribution_graph()
    table = build_comparison(g, root)
    spec = FilterSpec(hide_properties=frozenset({ns.RDF + "type", ns.RDFS + "label"}))
    csv_bytes = export_table(filter_table(table, spec), "csv")
    lines = csv_bytes.decode("utf-8").split("\r\n")
    assert lines[0] == "property,Solo"
    # no rdfs:label triple for the property here, so the prefixed name shows
    assert lines[1] == "schema:description,one contribution"


def test_turtle_export_contains_comparison_subgraph(fixture_graph):
    from orkgdk.turtle import parse_turtle

    table = build_comparison(fixture_graph, COMPARISON_ROOT)
    sub = parse_turtle(export_table(table, "ttl", graph=fixture_graph).decode("utf-8"))
    assert sub.match(COMPARISON_ROOT, prop("compareContribution"), None)
    member = contribution_named(fixture_graph, "SciER-Bench")
    assert sub.match(member, LABEL, None)
    # nothing outside the reachable subgraph leaks in: papers link TO
    # contributions, not the other way around, so they stay out
    assert not sub.match(None, prop("hasContribution"), None)


def test_timeline_buckets_by_year(fixture_graph):
    table = build_comparison(fixture_graph, COMPARISON_ROOT)
    buckets = timeline(table)
    years = [y for y, _ in buckets]
    assert years == sorted(years)  # no unknowns in the fixture
    assert years == [2011, 2014, 2017, 2020, 2022]
    assert sum(len(m) for _, m in buckets) == len(table.columns)


def test_timeline_single_bucket_when_same_year():
    g = Graph()
    members = []
    for i in range(3):
        c = res(f"C{i}")
        g.insert(Triple(c, TYPE, cls("Dataset")))
        g.insert(Triple(c, LABEL, Literal(f"D{i}")))
        members.append(c)
    root = create_comparison(g, res("CMP"), "same year", members)
    table = build_comparison(g, root)
    buckets = timeline(table)
    assert len(buckets) == 1
    assert buckets[0][0] is None  # no paper links at all -> unknown bucket


def test_timeline_unknown_year_goes_last(fixture_graph):
    extra = res("C_noyear")
    fixture_graph.insert(Triple(extra, TYPE, cls("Dataset")))
    fixture_graph.insert(Triple(extra, LABEL, Literal("NoYear")))
    fixture_graph.insert(Triple(COMPARISON_ROOT, prop("compareContribution"), extra))
    table = build_comparison(fixture_graph, COMPARISON_ROOT)
    buckets = timeline(table)
    assert buckets[-1][0] is None
    assert buckets[-1][1] == [extra.iri]
