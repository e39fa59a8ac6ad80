from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import data_text
from generators import random_graph, shape_sets
from shaclcheck import dl
from shaclcheck.kbformat import (
    DL_EXCHANGE,
    NATIVE,
    InexpressibleError,
    KbSyntaxError,
    format_native,
    parse_native,
    serialize_kb,
)
from shaclcheck.model import TYPE, Assignment, AtLeast, Prop, RdfGraph, Seq, Shape, ShapeSet, TOP
from shaclcheck.ntriples import NTriplesError, format_block, format_ntriples, parse_block, parse_ntriples
from shaclcheck.shapes_syntax import ShapeSyntaxError, format_shapes, parse_constraint, parse_shapes
from shaclcheck.translation import tau_shapes

# -- shapes syntax


@settings(max_examples=200, deadline=None)
@given(shape_sets(n_shapes=(1, 3), depth=2, props=("p", "q"), inverse=True))
def test_shapes_round_trip(shapes):
    text = format_shapes(shapes)
    again = parse_shapes(text).shapes
    assert again == shapes
    assert format_shapes(again) == text


def test_running_example_round_trips(s1):
    assert parse_shapes(format_shapes(s1)).shapes == s1


def test_spans_cover_each_shape():
    doc = parse_shapes("(shape A (target none) (constraint top))\n\n(shape B (target none) (constraint top))")
    assert doc.spans["A"].line == 1 and doc.spans["B"].line == 3


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("(shape A (target none)\n  (constraint (foo)))", 2, 15),
        ("(shape A (target none) (constraint (ref B)))", 1, 41),
        ("(shape A (target none) (constraint top))\n(shape A (target none) (constraint top))", 2, 8),
        ("(shape A (target none) (constraint (>= 0 p top)))", 1, 40),
        ("(shape A (target none) (constraint top)", 1, 1),
    ],
)
def test_shape_errors_carry_positions(text, line, column):
    with pytest.raises(ShapeSyntaxError) as info:
        parse_shapes(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_parse_constraint_desugars():
    assert parse_constraint("(exists p top)") == AtLeast(1, Prop("p"), TOP)
    with pytest.raises(ShapeSyntaxError):
        parse_constraint("top top")


# -- N-Triples


def test_empty_graph():
    assert parse_ntriples("") == RdfGraph((), frozenset())
    assert parse_ntriples("# only a comment\n\n").nodes == ()


def test_single_triple_graph():
    g = parse_ntriples(data_text("g1.nt"))
    assert g.nodes == ("bob", "charlie")
    assert g.triples == frozenset({("bob", "knows", "charlie")})


def test_running_example_graph(fig1b):
    assert any(p == TYPE for _, p, _ in fig1b.triples)
    assert parse_ntriples(format_ntriples(fig1b)).triples == fig1b.triples


def test_literals_keep_quotes_and_a_means_type():
    g = parse_ntriples('<x> a <C> .\n<x> <born> "1881" .')
    assert g.triples == frozenset({("x", TYPE, "C"), ("x", "born", '"1881"')})
    assert "<x> a <C> ." in format_ntriples(g)


@pytest.mark.parametrize(
    "text, line",
    [
        ("<a> <b> <c>", 1),
        ("<a> <b> <c> .\n<a> <b> .", 2),
        ('"lit" <b> <c> .', 1),
        ("<a> _:b <c> .", 1),
        ("<> <b> <c> .", 1),
        ('<a> <b> "x"@en .', 1),
    ],
)
def test_ntriples_errors(text, line):
    with pytest.raises(NTriplesError) as info:
        parse_ntriples(text)
    assert info.value.line == line


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_block_round_trip(seed):
    rng = random.Random(seed)
    graph = random_graph(rng)
    sigma = Assignment.for_graph(graph, {v: [s for s in ("S1", "S2") if rng.random() < 0.5] for v in graph.nodes})
    block = parse_block(format_block(graph, sigma))
    assert block.graph.nodes == graph.nodes and block.graph.triples == graph.triples
    assert dict(block.assignment) == dict(sigma)


def test_block_needs_every_node():
    with pytest.raises(NTriplesError):
        parse_block("<a> <p> <b> .\n\nASSIGN <a> S\n")


# -- knowledge bases


def test_golden_native(s1):
    assert serialize_kb(tau_shapes(s1), NATIVE) == data_text("golden/k_s1.kb")


def test_golden_dl_exchange(s1):
    assert serialize_kb(tau_shapes(s1), DL_EXCHANGE) == data_text("golden/k_s1.ofn")


def test_empty_kb_header():
    assert format_native(dl.KnowledgeBase.build([])) == "concepts:\nproperties:\nobjects:\n"


@settings(max_examples=150, deadline=None)
@given(shape_sets(n_shapes=(1, 3), depth=2, props=("p", "q"), inverse=True))
def test_native_round_trip(shapes):
    text = format_native(tau_shapes(shapes))
    kb = parse_native(text)
    assert format_native(kb) == text
    assert kb.signature == tau_shapes(shapes).signature


def test_native_parse_error_position():
    with pytest.raises(KbSyntaxError) as info:
        parse_native("concepts: A\nproperties:\nobjects:\n\nA ⊑ ⊓\n")
    assert info.value.line == 5


def test_counting_over_composition_is_not_exported():
    shapes = ShapeSet([Shape("A", AtLeast(2, Seq(Prop("p"), Prop("q")), TOP))])
    with pytest.raises(InexpressibleError):
        serialize_kb(tau_shapes(shapes), DL_EXCHANGE)


def test_exported_ontology_parses(s1):
    owl = pytest.importorskip("pyhornedowl")
    onto = owl.open_ontology_from_string(serialize_kb(tau_shapes(s1), DL_EXCHANGE), "ofn")
    assert len(onto.get_axioms()) > 0
