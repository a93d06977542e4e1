from __future__ import annotations

import json
import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orkgdk import namespaces as ns
from orkgdk.query import (
    Aggregate,
    Comparison,
    FilterExpr,
    QueryAst,
    QueryError,
    QuerySyntaxError,
    UnsupportedConstructError,
    Var,
    evaluate,
    expand_paths,
    explain,
    parse_query,
    run_query,
)
from orkgdk.rdf import Graph, Literal, Triple, TYPE, LABEL, cls, prop, res

from .generators import random_graph, random_query
from .oracles import naive_evaluate


def _rows_counter(table):
    return Counter(table.rows)


# -- parsing -------------------------------------------------------------------


def test_parse_query1(query1_text):
    ast = parse_query(query1_text)
    assert [ast.columns[0], ast.columns[1]] == ["task", "dataset"]
    assert not ast.distinct
    agg = ast.projection[1]
    assert isinstance(agg, Aggregate)
    assert (agg.var.name, agg.separator, agg.alias) == ("dataset", ",", "dataset")
    assert len(ast.patterns) == 4
    assert ast.pattern_group_count == 3  # the text has three subject statements
    assert [v.name for v in ast.group_by] == ["task"]
    path_pattern = ast.patterns[3]
    assert path_pattern.path == (ns.PRED + "P32", ns.RDFS + "label")


def test_parse_query2(query2_text):
    ast = parse_query(query2_text)
    assert ast.distinct
    assert ast.columns == ["concept", "agg1"]
    assert len(ast.filters) == 1
    disjuncts = ast.filters[0].disjuncts
    assert [c.value for c in disjuncts] == [Literal("Method"), Literal("Research problem")]
    assert all(c.op == "=" for c in disjuncts)
    paths = [p.path for p in ast.patterns if len(p.path) > 1]
    assert paths == [(ns.PRED + "P34062", ns.RDFS + "label")]


def test_double_pipe_filter_is_equivalent(query2_text):
    swapped = query2_text.replace("OR", "||")
    assert parse_query(swapped).filters == parse_query(query2_text).filters


def test_group_by_variable_must_occur_in_patterns():
    with pytest.raises(QueryError) as err:
        parse_query("SELECT ?x WHERE { ?x a class:Dataset } GROUP BY ?y")
    assert "?y" in str(err.value)


def test_projection_must_be_grouped_when_aggregating():
    with pytest.raises(QueryError):
        parse_query(
            "SELECT ?x GROUP_CONCAT(?y;separator=',') WHERE { ?x rdfs:label ?y } GROUP BY ?y"
        )


def test_syntax_error_carries_position():
    with pytest.raises(QuerySyntaxError) as err:
        parse_query("SELECT ?x WHERE {\n ?x a }")
    assert err.value.line == 2


@pytest.mark.parametrize(
    "text,construct",
    [
        ("SELECT ?x WHERE { OPTIONAL { ?x a class:Dataset } }", "OPTIONAL"),
        ("SELECT ?x WHERE { ?x a class:Dataset } ORDER BY ?x", "ORDER"),
        ("SELECT ?x WHERE { ?x a class:Dataset } LIMIT 5", "LIMIT"),
        ("PREFIX ex: <https://example.org/> SELECT ?x WHERE { ?x a ex:T }", "PREFIX"),
    ],
)
def test_unsupported_constructs_are_named(text, construct):
    with pytest.raises(UnsupportedConstructError) as err:
        parse_query(text)
    assert err.value.construct == construct


def test_unknown_prefix_in_query():
    with pytest.raises(QuerySyntaxError) as err:
        parse_query("SELECT ?x WHERE { ?x a foo:T }")
    assert "foo" in str(err.value)


# -- evaluation ----------------------------------------------------------------


def test_query1_over_empty_graph(query1_text):
    assert run_query(Graph(), query1_text).rows == []


def test_query1_fixture_matches_oracle(fixture_graph, query1_text):
    ast = parse_query(query1_text)
    table = evaluate(fixture_graph, ast)
    columns, expected = naive_evaluate(fixture_graph, ast)
    assert table.columns == columns
    assert _rows_counter(table) == expected
    # one row per distinct research-problem label
    task_labels = {
        t.object.lexical
        for c in fixture_graph.match(None, prop("P32"), None)
        for t in fixture_graph.match(c.object, LABEL, None)
    }
    assert {row[0].lexical for row in table.rows} == task_labels


def test_query2_fixture_matches_oracle(fixture_graph, query2_text):
    ast = parse_query(query2_text)
    table = evaluate(fixture_graph, ast)
    _, expected = naive_evaluate(fixture_graph, ast)
    assert _rows_counter(table) == expected
    concepts = [row[0].lexical for row in table.rows]
    assert concepts == ["Method", "Research problem"]
    method_row = table.rows[0]
    assert method_row[1].lexical == "LabLeader-IE,SciER-Bench"


def test_path_pattern_equals_manual_expansion(fixture_graph):
    path_ast = parse_query("SELECT ?task WHERE { ?c pred:P32/rdfs:label ?task }")
    manual_ast = parse_query(
        "SELECT ?task WHERE { ?c pred:P32 ?mid . ?mid rdfs:label ?task }"
    )
    assert _rows_counter(evaluate(fixture_graph, path_ast)) == _rows_counter(
        evaluate(fixture_graph, manual_ast)
    )


def test_plain_and_typed_string_literals_match_in_filters():
    g = Graph()
    g.insert(Triple(res("E1"), LABEL, Literal("Method")))
    table = run_query(
        g, 'SELECT ?l WHERE { ?x rdfs:label ?l FILTER(?l = "Method"^^xsd:string) }'
    )
    assert len(table.rows) == 1


def test_numeric_filter_compares_by_value():
    g = Graph()
    g.insert(Triple(res("L1"), prop("score"), Literal("0.70", ns.XSD_DECIMAL)))
    g.insert(Triple(res("L2"), prop("score"), Literal("0.85", ns.XSD_DECIMAL)))
    g.insert(Triple(res("L3"), prop("score"), Literal("0.7", ns.XSD_DECIMAL)))
    above = run_query(g, "SELECT ?x WHERE { ?x pred:score ?s FILTER(?s > 0.7) }")
    assert [row[0] for row in above.rows] == [res("L2")]
    equal = run_query(g, "SELECT ?x WHERE { ?x pred:score ?s FILTER(?s = 0.70) }")
    assert {row[0] for row in equal.rows} == {res("L1"), res("L3")}


def test_group_concat_is_insertion_order_invariant():
    triples = [Triple(res(f"D{i}"), TYPE, cls("Dataset")) for i in range(4)]
    triples += [Triple(res(f"D{i}"), LABEL, Literal(f"ds-{i}")) for i in range(4)]
    text = (
        "SELECT (GROUP_CONCAT(?l;separator=',') AS ?all) "
        "WHERE { ?d a class:Dataset ; rdfs:label ?l }"
    )
    outs = set()
    rng = random.Random(3)
    for _ in range(5):
        shuffled = triples[:]
        rng.shuffle(shuffled)
        outs.add(run_query(Graph().insert_all(shuffled), text).rows[0][0].lexical)
    assert outs == {"ds-0,ds-1,ds-2,ds-3"}


def test_filter_disjunction_inclusion_exclusion():
    # |A OR B| = |A| + |B| - |A AND B|, counted per row
    rng = random.Random(11)
    for _ in range(40):
        g = random_graph(rng)
        base = random_query(rng)
        if base.has_aggregates() or base.filters or not base.patterns:
            continue
        bound = sorted({v for p in base.patterns for v in p.variables()})
        v = Var(rng.choice(bound))
        a = Comparison(v, "=", Literal(rng.choice(["alpha", "beta"])))
        b = Comparison(v, ">", Literal(str(rng.randint(0, 5)), ns.XSD_INTEGER))
        ast_or = QueryAst(False, base.projection, base.patterns, [FilterExpr((a, b))], [])
        ast_a = QueryAst(False, base.projection, base.patterns, [FilterExpr((a,))], [])
        ast_b = QueryAst(False, base.projection, base.patterns, [FilterExpr((b,))], [])
        ast_ab = QueryAst(
            False, base.projection, base.patterns, [FilterExpr((a,)), FilterExpr((b,))], []
        )
        c_or = _rows_counter(evaluate(g, ast_or))
        c_a = _rows_counter(evaluate(g, ast_a))
        c_b = _rows_counter(evaluate(g, ast_b))
        c_ab = _rows_counter(evaluate(g, ast_ab))
        for row in set(c_or) | set(c_a) | set(c_b) | set(c_ab):
            assert c_or[row] == c_a[row] + c_b[row] - c_ab[row]


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_random_queries_match_oracle(seed):
    rng = random.Random(seed)
    g = random_graph(rng)
    ast = random_query(rng)
    table = evaluate(g, ast)
    columns, expected = naive_evaluate(g, ast)
    assert table.columns == columns
    if ast.distinct:
        assert set(table.rows) == set(expected)
    else:
        assert _rows_counter(table) == expected


def test_implicit_group_over_empty_solutions():
    table = run_query(
        Graph(), "SELECT (GROUP_CONCAT(?l;separator=',') AS ?all) WHERE { ?x rdfs:label ?l }"
    )
    assert table.rows == [(Literal(""),)]


# -- explain -------------------------------------------------------------------


def test_explain_query1_pattern_count(query1_text):
    ast = parse_query(query1_text)
    # manual expansion rule: a path of length k contributes k patterns
    expected = sum(len(p.path) for p in ast.patterns)
    assert expected == 5
    assert len(expand_paths(ast.patterns)) == expected
    text = explain(ast)
    assert f"patterns after path expansion ({expected})" in text
    assert text == explain(parse_query(query1_text))  # stable across runs


def test_explain_single_pattern_is_one_line():
    ast = parse_query("SELECT ?x WHERE { ?x a class:Dataset }")
    text = explain(ast)
    assert "patterns after path expansion (1)" in text
    assert text.count("match ") == 1


def test_explain_shows_filter_after_patterns(query2_text):
    text = explain(parse_query(query2_text))
    assert text.index("then filter:") > text.rindex("match ")


# -- exports -------------------------------------------------------------------


def test_csv_export_is_rfc4180(fixture_graph, query1_text):
    table = run_query(fixture_graph, query1_text)
    out = table.to_csv()
    lines = out.split("\r\n")
    assert lines[0] == "task,dataset"
    # multi-dataset cells contain commas, so they must be quoted
    assert any('"' in line and "," in line for line in lines[1:])


def test_json_export_shape(fixture_graph, query2_text):
    table = run_query(fixture_graph, query2_text)
    data = json.loads(json.dumps(table.to_json_dict()))
    assert data["columns"] == ["concept", "agg1"]
    assert all(len(row) == 2 for row in data["rows"])
