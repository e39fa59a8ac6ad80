"""Shapes to description logic and back.

``tau_*`` map shape syntax to concepts and axioms. :func:`model_from_assignment`
turns a graph with a faithful assignment into a finite model of the translated
knowledge base; :func:`graph_assignment_from_model` goes the other way.

A node constant names a graph node that may or may not exist, whereas a DL
nominal always denotes. :class:`Presence` fixes which mentioned names exist;
:func:`tau_shapes` with a presence specialises the knowledge base to graphs
agreeing with it (absent node constants become ⊥, absent classes are empty,
present classes get an object for their class node).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from . import dl
from .model import (
    TYPE,
    And,
    Assignment,
    AtLeast,
    ClassTarget,
    Constraint,
    Inverse,
    NoTarget,
    NodeConst,
    Nodes,
    Not,
    ObjectsOf,
    PathExpr,
    Prop,
    RdfGraph,
    Seq,
    Shape,
    ShapeRef,
    ShapeSet,
    SubjectsOf,
    TargetQuery,
    Top,
)
from .shacl import eval_constraint, eval_target, is_faithful

CLASS_PREFIX = "class:"


class BridgeError(ValueError):
    pass


class NameBridge:
    """Injective naming between the shape side and the DL side.

    Shape names keep their spelling as concept names. A class keeps its
    spelling too unless it clashes with a shape name, in which case it is
    prefixed with ``class:``. Nodes and properties keep their names as objects
    and role names; those partitions are disjoint on the DL side already.
    """

    def __init__(self, shape_names: Iterable[str] = (), class_names: Iterable[str] = ()) -> None:
        self.shape_names = tuple(dict.fromkeys(shape_names))
        shape_set = set(self.shape_names)
        self._class_fwd: dict[str, str] = {}
        taken = set(shape_set)
        for c in dict.fromkeys(class_names):
            name = c
            while name in taken:
                name = CLASS_PREFIX + name
            taken.add(name)
            self._class_fwd[c] = name
        self._class_bwd = {v: k for k, v in self._class_fwd.items()}
        self._shape_set = shape_set

    @classmethod
    def for_shapes(cls, shapes: ShapeSet, extra_classes: Iterable[str] = ()) -> "NameBridge":
        return cls(shapes.names, (*shapes.class_names(), *extra_classes))

    def with_classes(self, classes: Iterable[str]) -> "NameBridge":
        return NameBridge(self.shape_names, (*self._class_fwd, *classes))

    @property
    def class_names(self) -> tuple[str, ...]:
        return tuple(self._class_fwd)

    def shape(self, s: str) -> str:
        if s not in self._shape_set:
            raise BridgeError(f"unknown shape name {s!r}")
        return s

    def cls(self, c: str) -> str:
        try:
            return self._class_fwd[c]
        except KeyError:
            raise BridgeError(f"unknown class {c!r}") from None

    @staticmethod
    def node(v: str) -> str:
        return v

    @staticmethod
    def prop(p: str) -> str:
        return p

    def concept(self, name: str) -> tuple[str, str]:
        """Backward lookup of a concept name: ('shape', s) or ('class', c)."""
        if name in self._shape_set:
            return "shape", name
        if name in self._class_bwd:
            return "class", self._class_bwd[name]
        raise BridgeError(f"concept name {name!r} was not produced by this bridge")

    def is_shape_concept(self, name: str) -> bool:
        return name in self._shape_set


# -- presence of named nodes --------------------------------------------------


@dataclass(frozen=True)
class Presence:
    """Which mentioned node constants are missing and which classes exist."""

    absent_nodes: frozenset[str] = frozenset()
    present_classes: frozenset[str] = frozenset()
    absent_classes: frozenset[str] = frozenset()


def mentioned_names(shapes: ShapeSet) -> tuple[str, ...]:
    return tuple(dict.fromkeys((*shapes.node_names(), *shapes.class_names())))


def required_names(shapes: ShapeSet) -> frozenset[str]:
    """Names that must exist in any graph with a faithful assignment."""
    out: set[str] = set()
    for shape in shapes:
        if isinstance(shape.target, Nodes):
            out.update(shape.target.nodes)
    return frozenset(out)


def presence_of(graph_nodes: Iterable[str], shapes: ShapeSet) -> Presence:
    nodes = set(graph_nodes)
    return Presence(
        frozenset(v for v in shapes.node_names() if v not in nodes),
        frozenset(c for c in shapes.class_names() if c in nodes),
        frozenset(c for c in shapes.class_names() if c not in nodes),
    )


def presence_variants(shapes: ShapeSet) -> Iterator[Presence]:
    """All consistent presence choices, fewest absent constants first, then
    fewest present class-only names."""
    required = required_names(shapes)
    const = [v for v in shapes.node_names() if v not in required]
    classes = shapes.class_names()
    optional = list(dict.fromkeys([*const, *(c for c in classes if c not in required)]))
    choices = []
    for mask in itertools.product((False, True), repeat=len(optional)):
        present = {n for n, keep in zip(optional, mask) if keep} | required
        absent = frozenset(v for v in const if v not in present)
        present_classes = frozenset(c for c in classes if c in present)
        absent_classes = frozenset(classes) - present_classes
        class_only = len([c for c in present_classes if c not in shapes.node_names()])
        presence = Presence(absent, present_classes, absent_classes)
        choices.append((len(absent), class_only, mask, presence))
    choices.sort(key=lambda t: (t[0], t[1], [not m for m in t[2]]))
    for *_, presence in choices:
        yield presence


# -- τ mappings ---------------------------------------------------------------


def tau_role(path: PathExpr) -> dl.Role:
    if isinstance(path, Prop):
        return dl.RoleName(NameBridge.prop(path.name))
    if isinstance(path, Inverse):
        return dl.InverseRole(tau_role(path.path))
    if isinstance(path, Seq):
        return dl.Compose(tau_role(path.first), tau_role(path.second))
    raise TypeError(f"not a path: {path!r}")


def tau_constr(
    phi: Constraint,
    bridge: Optional[NameBridge] = None,
    absent: frozenset[str] = frozenset(),
) -> dl.Concept:
    if isinstance(phi, Top):
        return dl.TOP
    if isinstance(phi, ShapeRef):
        return dl.Atomic(bridge.shape(phi.name) if bridge else phi.name)
    if isinstance(phi, NodeConst):
        if phi.node in absent:
            return dl.bottom()
        return dl.Nominal((NameBridge.node(phi.node),))
    if isinstance(phi, And):
        return dl.And(tau_constr(phi.left, bridge, absent), tau_constr(phi.right, bridge, absent))
    if isinstance(phi, Not):
        return dl.Not(tau_constr(phi.inner, bridge, absent))
    if isinstance(phi, AtLeast):
        return dl.AtLeast(phi.n, tau_role(phi.path), tau_constr(phi.inner, bridge, absent))
    raise TypeError(f"not a core constraint: {phi!r}")


def tau_target(
    q: TargetQuery,
    bridge: Optional[NameBridge] = None,
    absent: frozenset[str] = frozenset(),
) -> dl.Concept:
    if isinstance(q, NoTarget):
        return dl.bottom()
    if isinstance(q, Nodes):
        kept = tuple(NameBridge.node(v) for v in q.nodes if v not in absent)
        return dl.Nominal(kept) if kept else dl.bottom()
    if isinstance(q, ClassTarget):
        return dl.Atomic(bridge.cls(q.cls) if bridge else q.cls)
    if isinstance(q, SubjectsOf):
        return dl.exists(dl.RoleName(q.prop), dl.TOP)
    if isinstance(q, ObjectsOf):
        return dl.exists(dl.InverseRole(dl.RoleName(q.prop)), dl.TOP)
    raise TypeError(f"not a target query: {q!r}")


def tau_shapes(
    shapes: ShapeSet,
    presence: Optional[Presence] = None,
    bridge: Optional[NameBridge] = None,
) -> dl.KnowledgeBase:
    """Two axioms per shape: ``τ(q) ⊑ s`` and ``τ(φ) ≡ s``.

    With a presence, absent node constants translate to ⊥ and classes it
    mentions get one extra axiom each: ``c ⊑ ⊥`` when absent, an assertion
    on the class node when present.
    """
    bridge = bridge or NameBridge.for_shapes(shapes)
    absent = presence.absent_nodes if presence else frozenset()
    axioms: list[dl.Axiom] = []
    for i, shape in enumerate(shapes):
        a = dl.Atomic(bridge.shape(shape.name))
        axioms.append(dl.Subsumption(tau_target(shape.target, bridge, absent), a))
        axioms.extend(dl.equivalence(tau_constr(shape.constraint, bridge, absent), a, i))
    if presence is not None:
        for c in shapes.class_names():
            if c in presence.present_classes:
                axioms.append(dl.ConceptAssertion(NameBridge.node(c), dl.TOP))
            elif c in presence.absent_classes:
                axioms.append(dl.Subsumption(dl.Atomic(bridge.cls(c)), dl.bottom()))
    signature = dl.Signature(
        tuple(bridge.shape(n) for n in shapes.names) + tuple(bridge.cls(c) for c in shapes.class_names()),
        tuple(NameBridge.prop(p) for p in shapes.properties()),
        tuple(NameBridge.node(v) for v in shapes.node_names() if v not in absent),
    )
    return dl.KnowledgeBase.build(axioms, signature)


# -- graph + assignment → model -----------------------------------------------


def model_from_assignment(
    graph: RdfGraph,
    sigma: Assignment,
    shapes: ShapeSet,
    bridge: Optional[NameBridge] = None,
) -> dl.Interpretation:
    """The finite model I_{G,σ}: nodes as elements, non-type triples as role
    pairs, type triples as class membership, σ as shape-concept membership."""
    if not graph.nodes:
        raise ValueError("the empty graph has no model: DL universes are non-empty")
    if not is_faithful(graph, shapes, sigma):
        raise ValueError("assignment is not faithful for this graph and shape set")
    graph_classes = [o for _, p, o in graph.sorted_triples() if p == TYPE]
    bridge = bridge or NameBridge.for_shapes(shapes)
    bridge = bridge.with_classes(graph_classes)
    objects = {NameBridge.node(v): v for v in graph.nodes}
    roles: dict[str, set] = {NameBridge.prop(p): set() for p in shapes.properties() if p != TYPE}
    concepts: dict[str, set] = {bridge.cls(c): set() for c in bridge.class_names}
    for s, p, o in graph.sorted_triples():
        if p == TYPE:
            concepts[bridge.cls(o)].add(s)
        else:
            roles.setdefault(NameBridge.prop(p), set()).add((s, o))
    for name in shapes.names:
        concepts[bridge.shape(name)] = {v for v in graph.nodes if name in sigma[v]}
    return dl.Interpretation(graph.nodes, objects, concepts, roles)


# -- model → graph + assignment -----------------------------------------------


@dataclass(frozen=True)
class GraphAssignment:
    graph: RdfGraph
    assignment: Assignment
    node_of: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((self.graph, self.assignment))


def _fresh_names(avoid: set[str]) -> Iterator[str]:
    for i in itertools.count(1):
        name = f"b{i}"
        if name not in avoid:
            yield name


def _isolated_assignment(shapes: ShapeSet) -> Optional[frozenset[str]]:
    """Shape names for a node with no edges and no name of interest, if any
    consistent choice exists."""
    probe = RdfGraph(("\0isolated",))
    names = shapes.names
    for k in range(len(names) + 1):
        for chosen in itertools.combinations(names, k):
            sigma = Assignment({"\0isolated": chosen})
            if all(
                eval_constraint(probe, sigma, "\0isolated", shape.constraint) == (shape.name in chosen)
                for shape in shapes
            ):
                return frozenset(chosen)
    return None


def graph_assignment_from_model(
    interp: dl.Interpretation,
    shapes: ShapeSet,
    presence: Optional[Presence] = None,
    bridge: Optional[NameBridge] = None,
) -> GraphAssignment:
    """G_I and σ_I from a model of the (presence-specialised) translation.

    Distinct object names must denote distinct elements, since each becomes
    its own graph node. Elements without an object name get fresh names
    ``b1, b2, …`` in universe order.
    """
    if presence is None:
        presence = Presence(
            frozenset(v for v in shapes.node_names() if v not in interp.objects),
            frozenset(c for c in shapes.class_names() if c in interp.objects),
        )
    elif not presence.absent_nodes.isdisjoint(interp.objects):
        raise ValueError("an absent node constant is interpreted as an object")
    kb = tau_shapes(shapes, presence, bridge)
    check = dl.check_model(interp, kb)
    if not check:
        raise ValueError(f"interpretation is not a model: fails {check.failing}")
    if not dl.unique_names(interp, interp.objects):
        raise ValueError("two object names denote the same element; graph nodes need distinct names")

    bridge = bridge or NameBridge.for_shapes(shapes)
    known = {bridge.cls(c) for c in bridge.class_names}
    bridge = bridge.with_classes(
        n for n in interp.concepts if not bridge.is_shape_concept(n) and n not in known
    )

    avoid = set(interp.objects) | set(shapes.names) | set(bridge.class_names)
    avoid |= set(shapes.node_names())
    avoid |= set(shapes.properties()) | set(interp.roles)
    by_element = {e: name for name, e in interp.objects.items()}
    fresh = _fresh_names(avoid)
    node_of = {e: by_element[e] if e in by_element else next(fresh) for e in interp.universe}

    nodes = [node_of[e] for e in interp.universe]
    triples: set = set()
    for p, pairs in interp.roles.items():
        for a, b in pairs:
            triples.add((node_of[a], p, node_of[b]))
    class_nodes: dict[str, str] = {}
    for concept_name, ext in interp.concepts.items():
        kind, name = bridge.concept(concept_name)
        if kind != "class" or not ext:
            continue
        class_nodes[name] = name
        for e in ext:
            triples.add((node_of[e], TYPE, name))
    added = [c for c in class_nodes if c not in set(nodes)]
    nodes += added

    sigma_map = {
        node_of[e]: frozenset(s for s in shapes.names if e in interp.concepts[bridge.shape(s)])
        for e in interp.universe
    }
    if added:
        isolated = _isolated_assignment(shapes)
        if isolated is None:
            raise ValueError("no consistent shape assignment exists for an isolated class node")
        for c in added:
            sigma_map[c] = isolated
    graph = RdfGraph(tuple(nodes), frozenset(triples))
    return GraphAssignment(graph, Assignment(sigma_map), node_of)


# -- subsumption as shapes ----------------------------------------------------


@dataclass(frozen=True)
class GciEncoding:
    shapes: ShapeSet
    sub_shape: str
    sup_shape: str
    marker_class: str


def _fresh(base: str, taken: set[str]) -> str:
    if base not in taken:
        return base
    for i in itertools.count(2):
        if f"{base}{i}" not in taken:
            return f"{base}{i}"
    raise AssertionError


def encode_gci(
    phi_c: Constraint,
    phi_d: Constraint,
    ambient: ShapeSet = ShapeSet(),
    *,
    names: Optional[tuple[str, str, str]] = None,
) -> GciEncoding:
    """Shapes whose containment ``sub <: sup`` is the subsumption C ⊑ D.

    ``sub`` is (φ_C, ⊥) and ``sup`` is (φ_D, class v_C) for a fresh class
    v_C, so the translation contains ``τ(φ_C) ≡ sub`` and ``τ(φ_D) ≡ sup``.
    """
    taken = set(ambient.names) | set(ambient.node_names()) | set(ambient.class_names())
    if names is not None:
        clash = taken.intersection(names)
        if clash or len(set(names)) != 3:
            raise ValueError(f"names collide with the ambient shape set: {sorted(clash) or names}")
        sub, sup, marker = names
    else:
        sub = _fresh("SubShape", taken)
        sup = _fresh("SupShape", taken | {sub})
        marker = _fresh("SubClass", taken | {sub, sup})
    extra = [Shape(sub, phi_c), Shape(sup, phi_d, ClassTarget(marker))]
    return GciEncoding(ambient.union(extra), sub, sup, marker)


def targets_of(graph: RdfGraph, shapes: ShapeSet) -> dict[str, frozenset[str]]:
    return {shape.name: eval_target(graph, shape.target) for shape in shapes}
