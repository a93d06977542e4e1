from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orkgdk import namespaces as ns
from orkgdk.rdf import Graph, Iri, Literal, Triple, TYPE, cls, res
from orkgdk.turtle import (
    BlankNodeError,
    TurtleParseError,
    UnknownPrefixError,
    parse_turtle,
    serialize_turtle,
)

from .generators import random_graph


def test_a_keyword_expands_to_rdf_type():
    g = parse_turtle('@prefix class: <https://orkg.org/class/> . <https://x/C1> a class:Dataset .')
    assert len(g) == 1
    t = next(iter(g))
    assert t.predicate.iri == ns.RDF + "type"
    assert t.object == cls("Dataset")


def test_empty_input_gives_empty_graph():
    assert len(parse_turtle("")) == 0
    assert len(parse_turtle("# only a comment\n")) == 0


def test_semicolon_and_comma_abbreviations():
    g = parse_turtle(
        'res:R1 a class:Dataset ; rdfs:label "A" ; schema:keywords "x", "y" .'
    )
    assert len(g) == 4


def test_typed_literals_and_language_tags():
    g = parse_turtle('res:R1 pred:score "0.85"^^xsd:decimal ; rdfs:label "Korpus"@de .')
    objs = {t.object for t in g}
    assert Literal("0.85", ns.XSD_DECIMAL) in objs
    assert Literal("Korpus", language="de") in objs


def test_bare_numbers_and_booleans():
    g = parse_turtle("res:R1 pred:n 42 ; pred:d 4.5 ; pred:b true .")
    objs = {t.object for t in g}
    assert Literal("42", ns.XSD_INTEGER) in objs
    assert Literal("4.5", ns.XSD_DECIMAL) in objs
    assert Literal("true", ns.XSD_BOOLEAN) in objs


def test_string_escapes_round_trip():
    g = Graph().insert(
        Triple(res("R1"), Iri(ns.RDFS + "label"), Literal('line1\nline2\t"quoted" \\ done'))
    )
    assert parse_turtle(serialize_turtle(g)) == g


def test_syntax_error_carries_position():
    with pytest.raises(TurtleParseError) as err:
        parse_turtle("res:R1 a\n   ;;; .")
    assert err.value.line == 2
    assert err.value.col >= 1
    assert "line 2" in str(err.value)


def test_unknown_prefix_rejected():
    with pytest.raises(UnknownPrefixError):
        parse_turtle("foo:R1 a class:Dataset .")


def test_blank_node_syntax_rejected_with_policy():
    for text in ("res:R1 pred:p [ ] .", "_:b a class:Dataset .", "res:R1 pred:p ( ) ."):
        with pytest.raises(BlankNodeError) as err:
            parse_turtle(text)
        assert "named IRI" in str(err.value)


def test_prefix_directive_and_redeclaration():
    g = parse_turtle(
        "@prefix ex: <https://example.org/> .\n"
        "ex:a a class:Dataset .\n"
        "@prefix ex: <https://other.example.org/> .\n"
        "ex:a a class:Dataset .\n"
    )
    subjects = {t.subject.iri for t in g}
    assert subjects == {"https://example.org/a", "https://other.example.org/a"}


def test_serialize_empty_graph_is_prefixes_only():
    text = serialize_turtle(Graph())
    lines = [line for line in text.strip().splitlines() if line]
    assert all(line.startswith("@prefix ") for line in lines)


def test_serialize_single_triple_uses_prefixed_names():
    g = Graph().insert(Triple(res("R1"), TYPE, cls("Dataset")))
    assert "res:R1 a class:Dataset ." in serialize_turtle(g)


def test_serialization_is_deterministic(fixture_graph):
    assert serialize_turtle(fixture_graph) == serialize_turtle(fixture_graph)
    rebuilt = Graph().insert_all(fixture_graph.triple_set())
    assert serialize_turtle(rebuilt) == serialize_turtle(fixture_graph)


def test_fixture_round_trip(fixture_graph):
    text = serialize_turtle(fixture_graph)
    reparsed = parse_turtle(text)
    assert reparsed == fixture_graph
    assert serialize_turtle(reparsed) == text


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_random_graph_round_trip(seed):
    g = random_graph(random.Random(seed))
    assert parse_turtle(serialize_turtle(g)) == g


def test_unparseable_local_names_fall_back_to_iriref():
    node = Iri("https://orkg.org/resource/a#b")  # '#' not valid in a local name
    g = Graph().insert(Triple(node, TYPE, cls("Dataset")))
    text = serialize_turtle(g)
    assert "<https://orkg.org/resource/a#b>" in text
    assert parse_turtle(text) == g
