"""Shape containment via concept subsumption.

``s <: s'`` holds iff every finite model of the translated knowledge base
puts ``s`` inside ``s'``. For inverse-free shape sets the tableau decides this
exactly (ALCOQ has the finite model property); bounded finite-model search
runs first because it finds small counterexamples much faster. For the other
fragments bounded search can only refute; running out of bound gives
Unknown, unless the caller vouches for an external proof
(``assume_entailed``), which yields a sound-only Contained.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from . import dl
from .finite import bounded_model_search
from .fragments import FragmentKind, classify
from .model import (
    TYPE,
    Assignment,
    ObjectsOf,
    RdfGraph,
    ShapeSet,
    SubjectsOf,
    Top,
    constraint_paths,
    path_properties,
)
from .shacl import is_faithful
from .tableau import TableauBudgetExceeded, tableau_sat
from .translation import (
    NameBridge,
    Presence,
    graph_assignment_from_model,
    presence_variants,
    tau_shapes,
)

DEFAULT_BOUND = 4


@dataclass(frozen=True)
class Contained:
    guarantee: str  # "complete" or "sound-only"
    method: str


@dataclass(frozen=True)
class NotContained:
    graph: RdfGraph
    assignment: Assignment
    witness: str
    method: str = "bounded-search"


@dataclass(frozen=True)
class Unknown:
    bound: int


ContainmentVerdict = Union[Contained, NotContained, Unknown]


class CounterexampleError(RuntimeError):
    """A reasoner produced a model that does not verify as a counterexample."""


class UnsupportedShapes(ValueError):
    pass


# -- subsumption --------------------------------------------------------------


@dataclass(frozen=True)
class Subsumption:
    holds: Optional[bool]
    model: Optional[dl.Interpretation] = None
    method: str = "tableau"

    def __bool__(self) -> bool:
        return self.holds is True


def _alcoq(c: dl.Concept) -> bool:
    return all(isinstance(r, dl.RoleName) for r in dl.concept_roles(c))


def subsumes(
    kb: dl.KnowledgeBase,
    sub: dl.Concept,
    sup: dl.Concept,
    *,
    bound: int = DEFAULT_BOUND,
    unique_names: bool = False,
    tidy: bool = False,
) -> Subsumption:
    """Does ``kb`` entail ``sub ⊑ sup``?

    Small countermodels are looked for first by bounded search. ALCOQ inputs
    then go to the tableau for a definite answer; anything else is left
    undecided (``holds is None``).
    """
    goal = dl.And(sub, dl.Not(sup))
    if sub == sup:
        return Subsumption(True, None, "syntactic")
    una = kb.signature.merge(dl.signature_of((), [goal])).objects if unique_names else ()
    model = bounded_model_search(kb, goal, bound, unique_names=una, tidy=tidy)
    if model is not None:
        return Subsumption(False, model, "bounded-search")
    if dl.dl_fragment(kb) == dl.ALCOQ and _alcoq(goal):
        try:
            result = tableau_sat(kb, goal, unique_names=unique_names)
        except TableauBudgetExceeded:
            return Subsumption(None, None, "bounded-search")
        if result.satisfiable:
            return Subsumption(False, result.model, "tableau")
        return Subsumption(True, None, "tableau")
    return Subsumption(None, None, "bounded-search")


# -- containment --------------------------------------------------------------


def check_supported(shapes: ShapeSet) -> None:
    for shape in shapes:
        for path in constraint_paths(shape.constraint):
            if TYPE in path_properties(path):
                raise UnsupportedShapes(
                    f"shape {shape.name} walks the {TYPE!r} property; class membership "
                    "is not a role in the translation, so containment is not supported"
                )
        if isinstance(shape.target, (SubjectsOf, ObjectsOf)) and shape.target.prop == TYPE:
            raise UnsupportedShapes(f"shape {shape.name} targets subjects/objects of {TYPE!r}")


def decide_containment(
    shapes: ShapeSet,
    s: str,
    s_prime: str,
    bound: int = DEFAULT_BOUND,
    *,
    assume_entailed: bool = False,
) -> ContainmentVerdict:
    """Is shape ``s`` contained in ``s_prime`` for every graph and every
    faithful assignment?"""
    for name in (s, s_prime):
        if name not in shapes:
            raise KeyError(f"unknown shape name {name!r}")
    if s == s_prime:
        return Contained("complete", "reflexivity")
    if isinstance(shapes[s_prime].constraint, Top):
        return Contained("complete", "top-constraint")
    check_supported(shapes)
    fragment = classify(shapes)
    bridge = NameBridge.for_shapes(shapes)
    goal = dl.And(dl.Atomic(bridge.shape(s)), dl.Not(dl.Atomic(bridge.shape(s_prime))))
    variants = [(presence, tau_shapes(shapes, presence, bridge)) for presence in presence_variants(shapes)]
    # cheap refutation first: small counterexamples come from bounded search
    for presence, kb in variants:
        model = bounded_model_search(kb, goal, bound, unique_names=kb.signature.objects, tidy=True)
        if model is not None:
            graph, sigma, witness = extract_counterexample(model, shapes, s, s_prime, presence)
            return NotContained(graph, sigma, witness, "bounded-search")
    if fragment.kind == FragmentKind.LNoInv:
        try:
            for presence, kb in variants:
                result = tableau_sat(kb, goal, unique_names=True)
                if result.model is not None:
                    graph, sigma, witness = extract_counterexample(result.model, shapes, s, s_prime, presence)
                    return NotContained(graph, sigma, witness, "tableau")
            return Contained("complete", "tableau")
        except TableauBudgetExceeded:
            pass
    if assume_entailed:
        return Contained("sound-only", "external")
    return Unknown(bound)


def extract_counterexample(
    interp: dl.Interpretation,
    shapes: ShapeSet,
    s: str,
    s_prime: str,
    presence: Optional[Presence] = None,
) -> tuple[RdfGraph, Assignment, str]:
    """Graph, faithful assignment and a witness node with ``s`` but not ``s'``."""
    bridge = NameBridge.for_shapes(shapes)
    inside = interp.concepts.get(bridge.shape(s), frozenset())
    outside = interp.concepts.get(bridge.shape(s_prime), frozenset())
    candidates = [e for e in interp.universe if e in inside and e not in outside]
    if not candidates:
        raise ValueError(f"the model has no element in {s} but outside {s_prime}")
    result = graph_assignment_from_model(interp, shapes, presence, bridge)
    graph, sigma = result.graph, result.assignment
    witness = result.node_of[candidates[0]]
    if not is_faithful(graph, shapes, sigma):
        raise CounterexampleError("extracted assignment is not faithful")
    if s not in sigma[witness] or s_prime in sigma[witness]:
        raise CounterexampleError("extracted witness does not separate the shapes")
    return graph, sigma, witness
