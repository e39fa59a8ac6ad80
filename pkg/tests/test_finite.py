from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from samples import k_infinite
from shaclcheck import dl
from shaclcheck.finite import SearchStats, bounded_model_search
from shaclcheck.translation import tau_shapes

A, B = dl.Atomic("A"), dl.Atomic("B")
P = dl.RoleName("p")


def test_running_example_counter_model(s1):
    kb = tau_shapes(s1)
    goal = dl.And(dl.Atomic("CubistShape"), dl.Not(dl.Atomic("PainterShape")))
    model = bounded_model_search(kb, goal, 5)
    assert model is not None
    assert dl.check_model(model, kb)
    assert dl.interpret_concept(model, goal)


def test_tidy_counter_model_has_no_loops(s1):
    kb = tau_shapes(s1)
    goal = dl.And(dl.Atomic("CubistShape"), dl.Not(dl.Atomic("PainterShape")))
    model = bounded_model_search(kb, goal, 5, unique_names=kb.signature.objects, tidy=True)
    assert all(a != b for pairs in model.roles.values() for a, b in pairs)
    witness = next(iter(dl.interpret_concept(model, goal)))
    assert witness not in model.objects.values()
    assert len(model.roles["creator"]) == 1 and len(model.roles["style"]) == 1


def test_no_finite_model_for_novel_painting():
    stats = SearchStats()
    assert bounded_model_search(k_infinite(), dl.Atomic("NovelPainting"), 4, stats=stats) is None
    assert stats.sizes_tried == 4


def test_painting_alone_has_finite_models():
    model = bounded_model_search(k_infinite(), dl.Atomic("Painting"), 2)
    assert model is not None and dl.check_model(model, k_infinite())


def test_trivial_search():
    model = bounded_model_search(dl.KnowledgeBase.build([]), dl.TOP, 1)
    assert model is not None and len(model.universe) == 1


def test_bound_must_be_positive():
    with pytest.raises(ValueError):
        bounded_model_search(dl.KnowledgeBase.build([]), dl.TOP, 0)


def test_unique_names_are_respected():
    kb = dl.KnowledgeBase.build([dl.Subsumption(dl.TOP, dl.Nominal(("a",)))])
    assert bounded_model_search(kb, dl.TOP, 3) is not None
    # everything equals a, so b cannot be a second element
    assert bounded_model_search(kb, dl.Nominal(("b",)), 3, unique_names=("a", "b")) is None


def test_smallest_universe_first():
    kb = dl.KnowledgeBase.build([dl.Subsumption(A, dl.AtLeast(3, P, dl.TOP))])
    model = bounded_model_search(kb, A, 5)
    assert len(model.universe) == 3


def random_kb(rng: random.Random) -> tuple[dl.KnowledgeBase, dl.Concept]:
    def concept(depth):
        leaves = [lambda: A, lambda: B, lambda: dl.TOP, lambda: dl.Nominal(("o",))]
        if depth == 0:
            return rng.choice(leaves)()
        return rng.choice([
            lambda: rng.choice(leaves)(),
            lambda: dl.Not(concept(depth - 1)),
            lambda: dl.And(concept(depth - 1), concept(depth - 1)),
            lambda: dl.AtLeast(rng.choice((1, 2)), P, concept(depth - 1)),
            lambda: dl.forall(P, concept(depth - 1)),
        ])()

    axioms = [dl.Subsumption(concept(1), concept(1)) for _ in range(rng.randint(1, 2))]
    sig = dl.Signature(("A", "B"), ("p",), ("o",))
    return dl.KnowledgeBase.build(axioms, sig), concept(1)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_search_agrees_with_enumeration(seed):
    kb, goal = random_kb(random.Random(seed))
    found = bounded_model_search(kb, goal, 2)
    brute = None
    for size in (1, 2):
        for interp in dl.enumerate_interpretations(kb.signature, size):
            if dl.check_model(interp, kb) and dl.interpret_concept(interp, goal):
                brute = interp
                break
        if brute is not None:
            break
    assert (found is None) == (brute is None)
    if found is not None:
        assert dl.check_model(found, kb) and dl.interpret_concept(found, goal)
        assert len(found.universe) == len(brute.universe)
