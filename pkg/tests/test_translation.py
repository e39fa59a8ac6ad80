from __future__ import annotations

import pytest

from generators import conforming_corpus
from oracle import faithful_pairs
from samples import i1
from shaclcheck import dl
from shaclcheck.model import (
    NO_TARGET,
    Assignment,
    AtLeast,
    ClassTarget,
    Inverse,
    NodeConst,
    Nodes,
    ObjectsOf,
    Prop,
    RdfGraph,
    Seq,
    Shape,
    ShapeSet,
    SubjectsOf,
    TOP,
    constraint_paths,
)
from shaclcheck.shacl import eval_path, is_faithful
from shaclcheck.translation import (
    BridgeError,
    NameBridge,
    encode_gci,
    graph_assignment_from_model,
    model_from_assignment,
    presence_of,
    presence_variants,
    tau_constr,
    tau_role,
    tau_shapes,
    tau_target,
)

CREATOR, STYLE = dl.RoleName("creator"), dl.RoleName("style")
SIGMA1 = {"guernica": {"PaintingShape"}, "picasso": {"PainterShape", "CubistShape"}}


def k_s1_by_hand() -> list[dl.Axiom]:
    painting, painter, cubist = (dl.Atomic(n) for n in ("PaintingShape", "PainterShape", "CubistShape"))
    birthdate, exhibited = dl.RoleName("birthdate"), dl.RoleName("exhibitedAt")
    return [
        dl.Subsumption(dl.Atomic("Painting"), painting),
        *dl.equivalence(dl.And(dl.exists(exhibited, dl.TOP), dl.forall(CREATOR, painter)), painting, 0),
        dl.Subsumption(dl.bottom(), painter),
        *dl.equivalence(
            dl.And(dl.exactly(1, birthdate, dl.TOP), dl.forall(dl.InverseRole(CREATOR), painting)), painter, 1
        ),
        dl.Subsumption(dl.bottom(), cubist),
        *dl.equivalence(
            dl.exists(dl.Compose(dl.InverseRole(CREATOR), STYLE), dl.Nominal(("cubism",))), cubist, 2
        ),
    ]


def test_tau_role():
    path = Seq(Inverse(Prop("creator")), Prop("style"))
    assert tau_role(path) == dl.Compose(dl.InverseRole(CREATOR), STYLE)
    assert tau_role(Prop("p")) == dl.RoleName("p")
    assert tau_role(Inverse(Prop("creator"))) == dl.InverseRole(CREATOR)


def test_tau_constr(s1):
    cubist = tau_constr(s1["CubistShape"].constraint)
    assert cubist == dl.AtLeast(1, dl.Compose(dl.InverseRole(CREATOR), STYLE), dl.Nominal(("cubism",)))
    assert tau_constr(TOP) == dl.TOP
    painter = tau_constr(s1["PainterShape"].constraint)
    assert painter == dl.And(
        dl.exactly(1, dl.RoleName("birthdate"), dl.TOP),
        dl.forall(dl.InverseRole(CREATOR), dl.Atomic("PaintingShape")),
    )


def test_tau_target():
    assert tau_target(ClassTarget("Painting")) == dl.Atomic("Painting")
    assert tau_target(NO_TARGET) == dl.bottom()
    assert tau_target(ObjectsOf("p")) == dl.exists(dl.InverseRole(dl.RoleName("p")), dl.TOP)
    assert tau_target(SubjectsOf("p")) == dl.exists(dl.RoleName("p"), dl.TOP)
    assert tau_target(Nodes(("b", "a"))) == dl.Nominal(("a", "b"))


def test_tau_shapes_running_example(s1):
    kb = tau_shapes(s1)
    assert list(kb.axioms) == k_s1_by_hand()
    assert len({ax.origin for ax in kb.axioms if ax.origin is not None}) == len(s1)


def test_tau_shapes_empty():
    assert tau_shapes(ShapeSet()).axioms == ()


def test_tau_shapes_erratum(erratum_shapes):
    my = dl.Atomic("MyShape")
    body = dl.AtLeast(1, dl.RoleName("knows"), dl.Nominal(("charlie",)))
    assert list(tau_shapes(erratum_shapes).axioms) == [
        dl.Subsumption(dl.Nominal(("alice",)), my),
        *dl.equivalence(body, my, 0),
    ]


def test_name_bridge_keeps_partitions_apart():
    bridge = NameBridge(["A"], ["A", "B"])
    assert bridge.cls("A") != bridge.shape("A")
    assert bridge.concept(bridge.cls("A")) == ("class", "A")
    assert bridge.concept("A") == ("shape", "A")
    assert bridge.cls("B") == "B"
    with pytest.raises(BridgeError):
        bridge.concept("Nope")


def test_presence_variants_put_everything_present_first(s1):
    variants = list(presence_variants(s1))
    assert len(variants) == 4
    assert variants[0].absent_nodes == frozenset()


def test_model_from_assignment_running_example(s1, fig1b):
    interp = model_from_assignment(fig1b, Assignment.for_graph(fig1b, SIGMA1), s1)
    assert interp.concepts["PaintingShape"] == {"guernica"}
    assert interp.concepts["PainterShape"] == interp.concepts["CubistShape"] == {"picasso"}
    assert interp.concepts["Painting"] == {"guernica"}
    assert ("guernica", "picasso") in interp.roles["creator"]
    assert "type" not in interp.roles
    assert dl.check_model(interp, tau_shapes(s1))


def test_model_from_assignment_rejects_bad_input(s1, fig1b):
    with pytest.raises(ValueError):
        model_from_assignment(RdfGraph(), Assignment({}), ShapeSet())
    with pytest.raises(ValueError):
        model_from_assignment(fig1b, Assignment.for_graph(fig1b), s1)


def test_model_from_assignment_without_shapes(g1):
    interp = model_from_assignment(g1, Assignment.for_graph(g1), ShapeSet())
    assert set(interp.universe) == {"bob", "charlie"}
    assert interp.roles["knows"] == {("bob", "charlie")}


def test_graph_from_counter_model(s1):
    result = graph_assignment_from_model(i1(), s1)
    g, sigma = result.graph, result.assignment
    assert g.triples == {("b2", "creator", "b1"), ("b2", "style", "cubism"), ("b4", "birthdate", "b3")}
    assert sigma == {"b1": {"CubistShape"}, "b2": set(), "cubism": set(), "b3": set(), "b4": {"PainterShape"}}
    assert is_faithful(g, s1, sigma)


def test_graph_from_one_element_model():
    result = graph_assignment_from_model(dl.Interpretation(("x",)), ShapeSet())
    assert len(result.graph.nodes) == 1 and not result.graph.triples
    assert result.assignment == {result.graph.nodes[0]: set()}


def test_graph_from_model_rejects_non_models(s1):
    broken = i1()
    broken = dl.Interpretation(broken.universe, broken.objects, {**broken.concepts, "CubistShape": set()}, broken.roles)
    with pytest.raises(ValueError):
        graph_assignment_from_model(broken, s1)


def test_graph_from_model_adds_class_nodes(s1, fig1b):
    interp = model_from_assignment(fig1b, Assignment.for_graph(fig1b, SIGMA1), s1)
    reduced = dl.Interpretation(
        tuple(e for e in interp.universe if e != "Painting"),
        {k: v for k, v in interp.objects.items() if k != "Painting"},
        interp.concepts,
        interp.roles,
    )
    result = graph_assignment_from_model(reduced, s1)
    assert ("guernica", "type", "Painting") in result.graph.triples
    assert is_faithful(result.graph, s1, result.assignment)


def test_round_trip_on_enumerated_pairs():
    shapes = ShapeSet([
        Shape("A", AtLeast(1, Prop("p"), NodeConst("a")), SubjectsOf("p")),
        Shape("B", AtLeast(1, Inverse(Prop("p")), TOP)),
    ])
    count = 0
    for nodes, triples, sigma in faithful_pairs(shapes, 3, ["p"], ["a"]):
        g = RdfGraph(nodes, triples)
        back = graph_assignment_from_model(model_from_assignment(g, Assignment(sigma), shapes), shapes)
        assert back.graph == g
        assert back.assignment == sigma
        count += 1
    assert count > 100


CORPUS = conforming_corpus(220)


def test_corpus_size():
    assert len(CORPUS) >= 200


def test_model_from_assignment_is_a_model():
    for g, sigma, shapes in CORPUS:
        interp = model_from_assignment(g, sigma, shapes)
        assert dl.check_model(interp, tau_shapes(shapes, presence_of(g.nodes, shapes)))
        if set(shapes.node_names()) <= g.node_set:
            assert dl.check_model(interp, tau_shapes(shapes))


def test_paths_and_roles_agree():
    extra = {Prop("p"), Inverse(Prop("q")), Seq(Prop("p"), Inverse(Prop("q")))}
    for g, sigma, shapes in CORPUS:
        interp = model_from_assignment(g, sigma, shapes).padded(dl.Signature((), ("p", "q")))
        paths = extra | {p for shape in shapes for p in constraint_paths(shape.constraint)}
        for path in paths:
            assert dl.interpret_role(interp, tau_role(path)) == eval_path(g, path)


def test_encode_gci_shapes():
    enc = encode_gci(AtLeast(2, Prop("p"), TOP), AtLeast(1, Prop("p"), TOP))
    assert enc.shapes[enc.sub_shape].target == NO_TARGET
    assert enc.shapes[enc.sup_shape].target == ClassTarget(enc.marker_class)
    kb = tau_shapes(enc.shapes)
    sub = dl.Atomic(enc.sub_shape)
    assert dl.Subsumption(dl.AtLeast(2, dl.RoleName("p"), dl.TOP), sub, 0) in kb.axioms
    assert dl.Subsumption(dl.Atomic(enc.marker_class), dl.Atomic(enc.sup_shape)) in kb.axioms


def test_encode_gci_avoids_and_rejects_collisions():
    ambient = ShapeSet([Shape("SubShape", TOP)])
    enc = encode_gci(TOP, TOP, ambient)
    assert enc.sub_shape != "SubShape" and "SubShape" in enc.shapes
    with pytest.raises(ValueError):
        encode_gci(TOP, TOP, ambient, names=("SubShape", "X", "Y"))
