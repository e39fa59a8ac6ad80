"""Shapes, constraints, paths, target queries, RDF graphs and assignments.

Every AST here is an immutable value. Derived constraint operators (``Or``,
``AtMost``, ``Exactly``, ``Forall``, ``Exists``) are accepted as input but are
rewritten into the six core constructors by :func:`desugar` before they are
stored in a :class:`Shape`.
"""

from __future__ import annotations

import sys
import threading
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Union

TYPE = sys.intern("type")


class SymbolTable:
    """Interns names per partition and remembers their first-seen order.

    Partitions are ``node``, ``class``, ``property`` and ``shape``. Interning a
    class also interns it as a node, since a class is a node usable in triples.
    Reads are lock-free; interning takes a lock (single writer).
    """

    PARTITIONS = ("node", "class", "property", "shape")

    def __init__(self) -> None:
        self._ids: dict[str, dict[str, int]] = {p: {} for p in self.PARTITIONS}
        self._lock = threading.Lock()
        self.intern("property", TYPE)

    def intern(self, partition: str, name: str) -> str:
        table = self._ids[partition]
        if name not in table:
            with self._lock:
                if name not in table:
                    table[sys.intern(name)] = len(table)
        if partition == "class":
            self.intern("node", name)
        return sys.intern(name)

    def index(self, partition: str, name: str) -> int:
        return self._ids[partition][name]

    def names(self, partition: str) -> tuple[str, ...]:
        return tuple(self._ids[partition])

    def __contains__(self, item: tuple[str, str]) -> bool:
        partition, name = item
        return name in self._ids[partition]


# -- path expressions ---------------------------------------------------------


@dataclass(frozen=True)
class Prop:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Inverse:
    path: "PathExpr"

    def __str__(self) -> str:
        return f"^{self.path}"


@dataclass(frozen=True)
class Seq:
    first: "PathExpr"
    second: "PathExpr"

    def __str__(self) -> str:
        return f"({self.first}/{self.second})"


PathExpr = Union[Prop, Inverse, Seq]


def path_properties(path: PathExpr) -> Iterator[str]:
    if isinstance(path, Prop):
        yield path.name
    elif isinstance(path, Inverse):
        yield from path_properties(path.path)
    else:
        yield from path_properties(path.first)
        yield from path_properties(path.second)


# -- constraints --------------------------------------------------------------


@dataclass(frozen=True)
class Top:
    def __str__(self) -> str:
        return "⊤"


@dataclass(frozen=True)
class ShapeRef:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class NodeConst:
    node: str

    def __str__(self) -> str:
        return self.node


@dataclass(frozen=True)
class And:
    left: "Constraint"
    right: "Constraint"

    def __str__(self) -> str:
        return f"({self.left} ∧ {self.right})"


@dataclass(frozen=True)
class Not:
    inner: "Constraint"

    def __str__(self) -> str:
        return f"¬{self.inner}"


@dataclass(frozen=True)
class AtLeast:
    n: int
    path: PathExpr
    inner: "Constraint"

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"qualified count must be a positive integer, got {self.n!r}")

    def __str__(self) -> str:
        return f"≥{self.n} {self.path}.{self.inner}"


Constraint = Union[Top, ShapeRef, NodeConst, And, Not, AtLeast]
CORE_CONSTRAINTS = (Top, ShapeRef, NodeConst, And, Not, AtLeast)

# Derived operators. They never survive construction of a Shape.


@dataclass(frozen=True)
class Or:
    left: "ExtendedConstraint"
    right: "ExtendedConstraint"


@dataclass(frozen=True)
class AtMost:
    n: int
    path: PathExpr
    inner: "ExtendedConstraint"

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 0:
            raise ValueError(f"count must be a non-negative integer, got {self.n!r}")


@dataclass(frozen=True)
class Exactly:
    n: int
    path: PathExpr
    inner: "ExtendedConstraint"

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 0:
            raise ValueError(f"count must be a non-negative integer, got {self.n!r}")


@dataclass(frozen=True)
class Forall:
    path: PathExpr
    inner: "ExtendedConstraint"


@dataclass(frozen=True)
class Exists:
    path: PathExpr
    inner: "ExtendedConstraint"


ExtendedConstraint = Union[Constraint, Or, AtMost, Exactly, Forall, Exists]

TOP = Top()


def desugar(phi: ExtendedConstraint) -> Constraint:
    """Rewrite derived operators into the core constructors.

    ``φ ∨ ψ`` becomes ``¬(¬φ ∧ ¬ψ)``, ``≤n ρ.φ`` becomes ``¬≥(n+1) ρ.φ``,
    ``=n ρ.φ`` becomes ``≤n ρ.φ ∧ ≥n ρ.φ`` (just ``≤0`` when n is 0) and
    ``∀ρ.φ`` becomes ``≤0 ρ.¬φ``. No other simplification happens, so the
    result is stable under a second application.
    """
    if isinstance(phi, (Top, ShapeRef, NodeConst)):
        return phi
    if isinstance(phi, And):
        return And(desugar(phi.left), desugar(phi.right))
    if isinstance(phi, Not):
        return Not(desugar(phi.inner))
    if isinstance(phi, AtLeast):
        return AtLeast(phi.n, phi.path, desugar(phi.inner))
    if isinstance(phi, Or):
        return Not(And(Not(desugar(phi.left)), Not(desugar(phi.right))))
    if isinstance(phi, AtMost):
        return Not(AtLeast(phi.n + 1, phi.path, desugar(phi.inner)))
    if isinstance(phi, Exactly):
        inner = desugar(phi.inner)
        upper = Not(AtLeast(phi.n + 1, phi.path, inner))
        if phi.n == 0:
            return upper
        return And(upper, AtLeast(phi.n, phi.path, inner))
    if isinstance(phi, Forall):
        return Not(AtLeast(1, phi.path, Not(desugar(phi.inner))))
    if isinstance(phi, Exists):
        return AtLeast(1, phi.path, desugar(phi.inner))
    raise TypeError(f"not a constraint: {phi!r}")


def free_shape_refs(phi: Constraint) -> frozenset[str]:
    """Shape names referenced anywhere inside ``phi``."""
    out: set[str] = set()
    stack = [phi]
    while stack:
        node = stack.pop()
        if isinstance(node, ShapeRef):
            out.add(node.name)
        elif isinstance(node, (And, Or)):
            stack += [node.left, node.right]
        elif isinstance(node, Not):
            stack.append(node.inner)
        elif isinstance(node, (AtLeast, AtMost, Exactly, Forall, Exists)):
            stack.append(node.inner)
    return frozenset(out)


def subterms(phi: Constraint) -> Iterator[Constraint]:
    yield phi
    if isinstance(phi, And):
        yield from subterms(phi.left)
        yield from subterms(phi.right)
    elif isinstance(phi, (Not, AtLeast)):
        yield from subterms(phi.inner)


def node_constants(phi: Constraint) -> Iterator[str]:
    for sub in subterms(phi):
        if isinstance(sub, NodeConst):
            yield sub.node


def constraint_paths(phi: Constraint) -> Iterator[PathExpr]:
    for sub in subterms(phi):
        if isinstance(sub, AtLeast):
            yield sub.path


# -- target queries -----------------------------------------------------------


@dataclass(frozen=True)
class NoTarget:
    def __str__(self) -> str:
        return "⊥"


@dataclass(frozen=True)
class Nodes:
    nodes: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.nodes:
            raise ValueError("an enumerated target needs at least one node")
        object.__setattr__(self, "nodes", tuple(sorted(set(self.nodes))))

    def __str__(self) -> str:
        return "{" + ", ".join(self.nodes) + "}"


@dataclass(frozen=True)
class ClassTarget:
    cls: str

    def __str__(self) -> str:
        return f"class {self.cls}"


@dataclass(frozen=True)
class SubjectsOf:
    prop: str

    def __str__(self) -> str:
        return f"subjectsOf {self.prop}"


@dataclass(frozen=True)
class ObjectsOf:
    prop: str

    def __str__(self) -> str:
        return f"objectsOf {self.prop}"


TargetQuery = Union[NoTarget, Nodes, ClassTarget, SubjectsOf, ObjectsOf]
NO_TARGET = NoTarget()


# -- shapes -------------------------------------------------------------------


@dataclass(frozen=True)
class Shape:
    name: str
    constraint: Constraint
    target: TargetQuery = NO_TARGET

    def __post_init__(self) -> None:
        object.__setattr__(self, "constraint", desugar(self.constraint))


class ShapeSetError(ValueError):
    pass


class ShapeSet:
    """A closed set of shapes, one per name, kept in insertion order."""

    def __init__(self, shapes: Iterable[Shape] = ()) -> None:
        self._shapes: dict[str, Shape] = {}
        for shape in shapes:
            if shape.name in self._shapes:
                raise ShapeSetError(f"duplicate shape name {shape.name!r}")
            self._shapes[shape.name] = shape
        for shape in self._shapes.values():
            missing = free_shape_refs(shape.constraint) - self._shapes.keys()
            if missing:
                raise ShapeSetError(
                    f"shape {shape.name!r} references undefined shape(s) "
                    + ", ".join(sorted(missing))
                )

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._shapes)

    def __getitem__(self, name: str) -> Shape:
        return self._shapes[name]

    def __contains__(self, name: object) -> bool:
        return name in self._shapes

    def __iter__(self) -> Iterator[Shape]:
        return iter(self._shapes.values())

    def __len__(self) -> int:
        return len(self._shapes)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ShapeSet) and self._shapes == other._shapes

    def __hash__(self) -> int:
        return hash(frozenset(self._shapes.values()))

    def __repr__(self) -> str:
        return f"ShapeSet({list(self._shapes.values())!r})"

    def union(self, other: Iterable[Shape]) -> "ShapeSet":
        return ShapeSet([*self, *other])

    def without(self, name: str) -> "ShapeSet":
        return ShapeSet(s for s in self if s.name != name)

    def node_names(self) -> tuple[str, ...]:
        """Graph nodes mentioned by constants or enumerated targets, in order."""
        seen: dict[str, None] = {}
        for shape in self:
            for v in node_constants(shape.constraint):
                seen.setdefault(v)
            if isinstance(shape.target, Nodes):
                for v in shape.target.nodes:
                    seen.setdefault(v)
        return tuple(seen)

    def class_names(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for shape in self:
            if isinstance(shape.target, ClassTarget):
                seen.setdefault(shape.target.cls)
        return tuple(seen)

    def properties(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for shape in self:
            for path in constraint_paths(shape.constraint):
                for p in path_properties(path):
                    seen.setdefault(p)
            if isinstance(shape.target, (SubjectsOf, ObjectsOf)):
                seen.setdefault(shape.target.prop)
        return tuple(seen)


# -- graphs and assignments ---------------------------------------------------

Triple = tuple[str, str, str]


@dataclass(frozen=True, eq=False)
class RdfGraph:
    """A finite labelled digraph. ``nodes`` keeps first-seen order."""

    nodes: tuple[str, ...] = ()
    triples: frozenset[Triple] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        nodes = tuple(dict.fromkeys(self.nodes))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "triples", frozenset(self.triples))
        known = set(nodes)
        for s, _, o in self.triples:
            if s not in known or o not in known:
                raise ValueError(f"triple ({s}, {o}) uses a node outside the graph")

    @classmethod
    def from_triples(cls, triples: Iterable[Triple], extra_nodes: Iterable[str] = ()) -> "RdfGraph":
        triples = list(triples)
        order: dict[str, None] = {}
        for s, _, o in triples:
            order.setdefault(s)
            order.setdefault(o)
        for v in extra_nodes:
            order.setdefault(v)
        return cls(tuple(order), frozenset(triples))

    @cached_property
    def node_set(self) -> frozenset[str]:
        return frozenset(self.nodes)

    @cached_property
    def order(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.nodes)}

    def sorted_triples(self) -> list[Triple]:
        idx = self.order
        return sorted(self.triples, key=lambda t: (idx[t[0]], t[1], idx[t[2]]))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, RdfGraph)
            and self.node_set == other.node_set
            and self.triples == other.triples
        )

    @cached_property
    def _hash(self) -> int:
        return hash((self.node_set, self.triples))

    def __hash__(self) -> int:
        return self._hash

    def __len__(self) -> int:
        return len(self.nodes)


class Assignment(Mapping[str, frozenset]):
    """Total map from graph nodes to sets of shape names."""

    def __init__(self, mapping: Mapping[str, Iterable[str]]) -> None:
        self._map = {v: frozenset(names) for v, names in mapping.items()}

    @classmethod
    def for_graph(cls, graph: RdfGraph, mapping: Mapping[str, Iterable[str]] = {}) -> "Assignment":
        extra = set(mapping) - graph.node_set
        if extra:
            raise ValueError(f"nodes outside the graph: {sorted(extra)}")
        return cls({v: mapping.get(v, ()) for v in graph.nodes})

    def __getitem__(self, node: str) -> frozenset:
        return self._map[node]

    def __iter__(self) -> Iterator[str]:
        return iter(self._map)

    def __len__(self) -> int:
        return len(self._map)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Assignment):
            return self._map == other._map
        if isinstance(other, Mapping):
            return self._map == {k: frozenset(v) for k, v in other.items()}
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._map.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{v}: {sorted(s)}" for v, s in self._map.items())
        return f"Assignment({{{inner}}})"

    def is_total_for(self, graph: RdfGraph) -> bool:
        return self._map.keys() == graph.node_set

    def nodes_with(self, shape: str) -> frozenset[str]:
        return frozenset(v for v, names in self._map.items() if shape in names)
