from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from samples import i1, k_infinite
from shaclcheck import dl
from shaclcheck.translation import tau_shapes

A, B = dl.Atomic("A"), dl.Atomic("B")
P, Q = dl.RoleName("p"), dl.RoleName("q")
SIG = dl.Signature(("A", "B"), ("p", "q"), ("o",))


def test_interpret_role_composition():
    cubist = dl.Compose(dl.InverseRole(dl.RoleName("creator")), dl.RoleName("style"))
    assert dl.interpret_role(i1(), cubist) == {("b1", "cubism")}


def test_interpret_role_basics():
    interp = dl.Interpretation(("x", "y"), {}, {}, {"p": {("x", "y")}, "q": set()})
    assert dl.interpret_role(interp, Q) == frozenset()
    assert dl.interpret_role(interp, dl.InverseRole(P)) == {("y", "x")}
    with pytest.raises(dl.UnknownName):
        dl.interpret_role(interp, dl.RoleName("r"))


def test_interpret_concept_basics():
    interp = i1()
    goal = dl.And(dl.Atomic("CubistShape"), dl.Not(dl.Atomic("PainterShape")))
    assert "b1" in dl.interpret_concept(interp, goal)
    assert dl.interpret_concept(interp, dl.TOP) == set(interp.universe)
    a = dl.Atomic("PainterShape")
    assert dl.interpret_concept(interp, dl.And(a, dl.Not(a))) == frozenset()
    assert dl.interpret_concept(interp, dl.Nominal(("cubism",))) == {"cubism"}


def test_check_model_on_running_example(s1):
    assert dl.check_model(i1(), tau_shapes(s1))


def test_check_model_reports_first_failing_axiom(s1):
    broken = i1()
    broken = dl.Interpretation(
        broken.universe, broken.objects, {**broken.concepts, "CubistShape": set()}, broken.roles
    )
    check = dl.check_model(broken, tau_shapes(s1))
    assert not check
    kb = tau_shapes(s1)
    failing = [ax for ax in kb.axioms if not dl.axiom_holds(broken, ax)]
    assert check.failing == failing[0]


def test_empty_kb_always_holds():
    interp = dl.Interpretation(("x",))
    assert dl.check_model(interp, dl.KnowledgeBase.build([]))


def test_check_model_needs_signature():
    with pytest.raises(dl.SignatureError):
        dl.check_model(dl.Interpretation(("x",)), dl.KnowledgeBase.build([dl.Subsumption(A, B)]))


def test_k_infinite_small_interpretations_fail():
    kb = k_infinite()
    sig = kb.signature
    novel = dl.Atomic("NovelPainting")
    for size in (1, 2):
        for interp in dl.enumerate_interpretations(sig, size):
            if dl.interpret_concept(interp, novel):
                assert not dl.check_model(interp, kb)


def test_kb_signature_is_checked():
    with pytest.raises(dl.SignatureError):
        dl.KnowledgeBase(dl.Signature(("A",)), (dl.Subsumption(A, B),))


def test_equivalence_shares_origin():
    left, right = dl.equivalence(A, B, 7)
    assert (left.sub, left.sup, right.sub, right.sup) == (A, B, B, A)
    assert left.origin == right.origin == 7


def test_interpretation_needs_elements():
    with pytest.raises(ValueError):
        dl.Interpretation(())
    with pytest.raises(ValueError):
        dl.Interpretation(("x",), {"o": "y"})


def test_nnf_examples():
    assert dl.nnf(dl.Not(dl.And(A, B))) == dl.Or(dl.Not(A), dl.Not(B))
    assert dl.nnf(dl.Not(dl.AtLeast(1, P, A))) == dl.AtMost(0, P, A)
    assert dl.nnf(dl.Not(dl.Not(A))) == A


def test_dl_fragment(s1):
    assert dl.dl_fragment(tau_shapes(s1)) == dl.SROIQ_EXPRESSIBLE
    atomic = dl.KnowledgeBase.build([dl.Subsumption(A, dl.AtLeast(2, P, B))])
    assert dl.dl_fragment(atomic) == dl.ALCOQ
    counting = dl.KnowledgeBase.build([dl.Subsumption(A, dl.AtLeast(2, dl.Compose(P, Q), dl.TOP))])
    assert dl.dl_fragment(counting) == dl.ALCOIQ_COMPOSITION
    forall = dl.KnowledgeBase.build([dl.Subsumption(A, dl.forall(dl.Compose(P, Q), B))])
    assert dl.dl_fragment(forall) == dl.SROIQ_EXPRESSIBLE


def test_expand_composition():
    c = dl.exists(dl.Compose(P, dl.Compose(Q, P)), A)
    assert dl.expand_composition(c) == dl.exists(P, dl.exists(Q, dl.exists(P, A)))
    with pytest.raises(ValueError):
        dl.expand_composition(dl.AtLeast(2, dl.Compose(P, Q), A))


def test_normalize_role_pushes_inverse():
    r = dl.InverseRole(dl.Compose(P, dl.InverseRole(Q)))
    assert dl.normalize_role(r) == dl.Compose(Q, dl.InverseRole(P))


# -- properties ---------------------------------------------------------------


def random_role(rng: random.Random, depth: int = 1) -> dl.Role:
    r = rng.random()
    if depth == 0 or r < 0.5:
        return rng.choice((P, Q))
    if r < 0.75:
        return dl.InverseRole(random_role(rng, depth - 1))
    return dl.Compose(random_role(rng, depth - 1), random_role(rng, depth - 1))


def random_concept(rng: random.Random, depth: int) -> dl.Concept:
    leaves = [lambda: A, lambda: B, lambda: dl.TOP, lambda: dl.Nominal(("o",))]
    if depth == 0:
        return rng.choice(leaves)()
    sub = lambda: random_concept(rng, depth - 1)  # noqa: E731
    return rng.choice([
        lambda: rng.choice(leaves)(),
        lambda: dl.Not(sub()),
        lambda: dl.And(sub(), sub()),
        lambda: dl.union(sub(), sub()),
        lambda: dl.AtLeast(rng.choice((1, 2)), random_role(rng), sub()),
        lambda: dl.at_most(rng.choice((0, 1)), random_role(rng), sub()),
        lambda: dl.forall(random_role(rng), sub()),
    ])()


def random_interpretation(rng: random.Random, size: int) -> dl.Interpretation:
    universe = tuple(range(size))
    pairs = [(a, b) for a in universe for b in universe]
    return dl.Interpretation(
        universe,
        {"o": rng.choice(universe)},
        {c: {e for e in universe if rng.random() < 0.5} for c in SIG.concepts},
        {p: {x for x in pairs if rng.random() < 0.4} for p in SIG.properties},
    )


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_nnf_preserves_meaning(seed, size):
    rng = random.Random(seed)
    c = random_concept(rng, 3)
    normal = dl.nnf(c)
    assert dl.is_nnf(normal)
    interp = random_interpretation(rng, size)
    assert dl.interpret_concept(interp, normal) == dl.interpret_concept(interp, c)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_extra_axiom_is_a_subset_check(seed, size):
    rng = random.Random(seed)
    kb = dl.KnowledgeBase.build([dl.Subsumption(random_concept(rng, 2), random_concept(rng, 2))], SIG)
    c, d = random_concept(rng, 2), random_concept(rng, 2)
    interp = random_interpretation(rng, size)
    extended = kb.extend([dl.Subsumption(c, d)])
    subset = dl.interpret_concept(interp, c) <= dl.interpret_concept(interp, d)
    assert bool(dl.check_model(interp, extended)) == (bool(dl.check_model(interp, kb)) and subset)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(0, 3))
def test_at_most_is_complement_of_at_least(seed, size, n):
    rng = random.Random(seed)
    role, c = random_role(rng), random_concept(rng, 1)
    interp = random_interpretation(rng, size)
    everything = set(interp.universe)
    at_most = dl.interpret_concept(interp, dl.AtMost(n, role, c))
    assert at_most == everything - dl.interpret_concept(interp, dl.AtLeast(n + 1, role, c))
    assert at_most == dl.interpret_concept(interp, dl.at_most(n, role, c))


def test_enumerated_interpretations_match_nnf():
    sig = dl.Signature(("A",), ("p",), ())
    rng = random.Random(3)
    concepts = [random_concept(rng, 2) for _ in range(30)]
    concepts = [c for c in concepts if not list(dl.object_names(c)) and "B" not in dl.concept_names(c)]
    concepts = [c for c in concepts if all(set(dl.role_names(r)) <= {"p"} for r in dl.concept_roles(c))]
    assert concepts
    for size in (1, 2):
        for interp in dl.enumerate_interpretations(sig, size):
            for c in concepts:
                assert dl.interpret_concept(interp, dl.nnf(c)) == dl.interpret_concept(interp, c)
