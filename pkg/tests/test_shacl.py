from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import random_shape_set, shape_sets
from oracle import faithful_pairs, graphs, node_sets, pairs_of
from shaclcheck.model import (
    NO_TARGET,
    And,
    Assignment,
    AtLeast,
    ClassTarget,
    Forall,
    Inverse,
    NodeConst,
    Nodes,
    Not,
    Prop,
    RdfGraph,
    Seq,
    Shape,
    ShapeRef,
    ShapeSet,
    TOP,
    subterms,
)
from shaclcheck.shacl import (
    SearchTooLarge,
    check_stratified,
    conforms,
    eval_constraint,
    eval_path,
    eval_target,
    faithfulness_violations,
    find_faithful,
    is_faithful,
)

SIGMA1 = {
    "guernica": {"PaintingShape"},
    "picasso": {"PainterShape", "CubistShape"},
}


def sigma1(graph):
    return Assignment.for_graph(graph, SIGMA1)


def test_eval_path_composition(fig1b):
    assert eval_path(fig1b, Seq(Inverse(Prop("creator")), Prop("style"))) == {("picasso", "cubism")}


def test_eval_path_absent_property(fig1b):
    assert eval_path(fig1b, Prop("nothing")) == frozenset()


def test_eval_path_join():
    g = RdfGraph.from_triples([("a", "p", "b"), ("b", "p", "c")])
    assert eval_path(g, Seq(Prop("p"), Prop("p"))) == {("a", "c")}


def test_eval_constraint_running_example(s1, fig1b):
    sigma = sigma1(fig1b)
    assert eval_constraint(fig1b, sigma, "guernica", s1["PaintingShape"].constraint)
    assert eval_constraint(fig1b, sigma, "picasso", s1["CubistShape"].constraint)
    assert eval_constraint(fig1b, sigma, "mncars", TOP)


def test_eval_constraint_rejects_foreign_node(fig1b):
    with pytest.raises(ValueError):
        eval_constraint(fig1b, sigma1(fig1b), "nobody", TOP)


def test_eval_target(fig1b, g1):
    assert eval_target(fig1b, ClassTarget("Painting")) == {"guernica"}
    assert eval_target(fig1b, NO_TARGET) == frozenset()
    assert eval_target(g1, Nodes(("alice",))) == {"alice"}


def test_is_faithful_running_example(s1, fig1b):
    assert is_faithful(fig1b, s1, sigma1(fig1b))


def test_is_faithful_rejects_partial_assignment(s1, fig1b):
    with pytest.raises(ValueError):
        is_faithful(fig1b, s1, Assignment({"guernica": {"PaintingShape"}}))


def test_missing_target_is_never_faithful(erratum_shapes, g1):
    for bits in range(4):
        sigma = Assignment({
            "bob": {"MyShape"} if bits & 1 else set(),
            "charlie": {"MyShape"} if bits & 2 else set(),
        })
        assert not is_faithful(g1, erratum_shapes, sigma)
    sigma = Assignment({"bob": {"MyShape"}, "charlie": set()})
    assert is_faithful(g1, erratum_shapes, sigma, erratum=False)
    reasons = faithfulness_violations(g1, erratum_shapes, sigma)
    assert reasons == ["target node alice missing from data graph (shape MyShape)"]


def test_empty_everything_is_faithful():
    assert is_faithful(RdfGraph(), ShapeSet(), Assignment({}))


def test_find_faithful_running_example(s1, fig1b):
    # 7 nodes x 3 shapes is one bit over the default exhaustive cap
    result = find_faithful(fig1b, s1, 1)
    assert result.strategy == "fixpoint"
    assert result.assignments == [sigma1(fig1b)]
    full = find_faithful(fig1b, s1, 10, max_bits=21)
    assert full.strategy == "exhaustive"
    assert full.assignments == [sigma1(fig1b)]


def test_find_faithful_two_solutions_for_self_loop():
    shapes = ShapeSet([Shape("Local", Forall(Prop("knows"), ShapeRef("Local")))])
    g = RdfGraph.from_triples([("b1", "knows", "b1")])
    found = find_faithful(g, shapes, 10).assignments
    assert found == [Assignment({"b1": set()}), Assignment({"b1": {"Local"}})]


def test_find_faithful_empty_graph(s1):
    assert find_faithful(RdfGraph(), ShapeSet([Shape("A", TOP)]), 1).assignments == [Assignment({})]
    assert conforms(RdfGraph(), s1)


def test_conforms(s1, fig1b, erratum_shapes, g1):
    assert conforms(fig1b, s1)
    assert not conforms(g1, erratum_shapes)
    assert find_faithful(g1, erratum_shapes).strategy == "target-check"
    assert conforms(g1, erratum_shapes, erratum=False)


def test_limit_must_be_positive(s1, fig1b):
    with pytest.raises(ValueError):
        find_faithful(fig1b, s1, 0)


def test_stratification_reports():
    report = check_stratified(ShapeSet([Shape("A", Not(ShapeRef("A")))]))
    assert not report.ok and report.cycle == ("A",)
    local = ShapeSet([Shape("Local", Forall(Prop("knows"), ShapeRef("Local")))])
    assert check_stratified(local).ok


def test_stratification_running_example(s1):
    report = check_stratified(s1)
    assert report.ok and report.cycle is None
    assert ("PaintingShape", "PainterShape", "positive") in report.edges
    assert ("PainterShape", "PaintingShape", "positive") in report.edges


def test_fixpoint_on_large_graph(s1):
    # enough nodes that exhaustive search is off the table
    triples = []
    for i in range(12):
        triples += [(f"p{i}", "type", "Painting"), (f"p{i}", "exhibitedAt", "m"),
                    (f"p{i}", "creator", f"a{i}"), (f"a{i}", "birthdate", f'"{i}"')]
    g = RdfGraph.from_triples(triples)
    result = find_faithful(g, s1)
    assert result.strategy == "fixpoint"
    assert len(result.assignments) == 1 and is_faithful(g, s1, result.assignments[0])


def test_fixpoint_refuses_unstratified_large_graph():
    shapes = ShapeSet([Shape("A", Not(ShapeRef("A")))])
    g = RdfGraph(tuple(f"n{i}" for i in range(25)))
    with pytest.raises(SearchTooLarge):
        find_faithful(g, shapes)


# -- properties ---------------------------------------------------------------


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_double_inverse_is_identity(seed):
    rng = random.Random(seed)
    nodes = ("a", "b", "c")
    triples = frozenset((x, p, y) for p in "pq" for x in nodes for y in nodes if rng.random() < 0.3)
    g = RdfGraph(nodes, triples)
    path = rng.choice([Prop("p"), Seq(Prop("p"), Inverse(Prop("q"))), Inverse(Prop("q"))])
    assert eval_path(g, Inverse(Inverse(path))) == eval_path(g, path)
    assert eval_path(g, path) == pairs_of(triples, path)


@settings(max_examples=25, deadline=None)
@given(shape_sets(n_shapes=(1, 2), depth=2))
def test_exhaustive_search_matches_oracle(shapes):
    expected: dict = {}
    for nodes, triples, sigma in faithful_pairs(shapes, 2, ["p"], ["a"]):
        expected.setdefault((nodes, triples), set()).add(Assignment(sigma))
    for nodes in node_sets(["a"], 2):
        for triples in graphs(nodes, ["p"]):
            g = RdfGraph(nodes, triples)
            found = find_faithful(g, shapes, 1 << 8).assignments
            assert set(found) == expected.get((nodes, triples), set())
            assert len(found) == len(set(found))


def _monotone(shapes) -> bool:
    def positive(phi, negated=False):
        if isinstance(phi, ShapeRef):
            return not negated
        if isinstance(phi, Not):
            return positive(phi.inner, True)
        if isinstance(phi, And):
            return positive(phi.left, negated) and positive(phi.right, negated)
        if isinstance(phi, AtLeast):
            return positive(phi.inner, negated)
        return True

    return all(positive(s.constraint) for s in shapes)


def _monotone_sets():
    out = []
    seed = 0
    while len(out) < 12:
        candidate = random_shape_set(random.Random(seed), 2, 2)
        seed += 1
        if _monotone(candidate) and any(
            isinstance(t, ShapeRef) for s in candidate for t in subterms(s.constraint)
        ):
            out.append(candidate)
    return out


@pytest.mark.parametrize("shapes", _monotone_sets())
def test_fixpoint_agrees_with_exhaustive_on_monotone_sets(shapes):
    for nodes in (("a",), ("a", "f1"), ("a", "f1", "f2")):
        rng = random.Random(len(nodes))
        for _ in range(15):
            triples = frozenset((x, "p", y) for x in nodes for y in nodes if rng.random() < 0.4)
            g = RdfGraph(nodes, triples)
            everything = find_faithful(g, shapes, 1 << 12).assignments
            result = find_faithful(g, shapes, max_bits=0)
            assert result.strategy == "fixpoint"
            fix = result.assignments
            assert bool(fix) == bool(everything)
            if fix:
                assert fix[0] in everything
                for sigma in everything:
                    assert all(sigma[v] <= fix[0][v] for v in g.nodes)


@settings(max_examples=40, deadline=None)
@given(shape_sets(n_shapes=(1, 3), depth=2))
def test_faithful_assignments_cover_targets(shapes):
    g = RdfGraph.from_triples([("a", "p", "f1"), ("f1", "p", "f1")])
    for sigma in find_faithful(g, shapes, 4).assignments:
        for shape in shapes:
            holders = {v for v in g.nodes if shape.name in sigma[v]}
            assert eval_target(g, shape.target) <= holders <= g.node_set


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_forall_means_every_successor(seed):
    rng = random.Random(seed)
    nodes = ("a", "b", "c")
    triples = frozenset((x, "p", y) for x in nodes for y in nodes if rng.random() < 0.4)
    g = RdfGraph(nodes, triples)
    sigma = Assignment({v: {"A"} if rng.random() < 0.5 else set() for v in nodes})
    inner = And(ShapeRef("A"), Not(NodeConst("c")))
    phi = Shape("X", Forall(Prop("p"), inner)).constraint
    for v in nodes:
        succ = [w for x, _, w in triples if x == v]
        expected = all("A" in sigma[w] and w != "c" for w in succ)
        assert eval_constraint(g, sigma, v, phi) == expected
