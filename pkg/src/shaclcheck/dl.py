"""Description-logic syntax, knowledge bases and finite interpretations.

Concepts are stored in six core forms (atomic, nominal, top, negation,
conjunction, qualified at-least). The helpers :func:`bottom`, :func:`union`,
:func:`at_most`, :func:`exists`, :func:`forall` and :func:`exactly` build core
forms. :func:`nnf` additionally produces the variants :class:`Or`,
:class:`AtMost` and :class:`Bottom`, which exist only as negation-normal-form
output for the tableau.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Union

# -- roles --------------------------------------------------------------------


@dataclass(frozen=True)
class RoleName:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class InverseRole:
    role: "Role"


@dataclass(frozen=True)
class Compose:
    first: "Role"
    second: "Role"


Role = Union[RoleName, InverseRole, Compose]


def role_names(role: Role) -> Iterator[str]:
    if isinstance(role, RoleName):
        yield role.name
    elif isinstance(role, InverseRole):
        yield from role_names(role.role)
    else:
        yield from role_names(role.first)
        yield from role_names(role.second)


def invert(role: Role) -> Role:
    """Inverse pushed down to role names: (r∘s)⁻ = s⁻∘r⁻, r⁻⁻ = r."""
    if isinstance(role, RoleName):
        return InverseRole(role)
    if isinstance(role, InverseRole):
        return role.role if isinstance(role.role, RoleName) else invert(invert(role.role))
    return Compose(invert(role.second), invert(role.first))


def normalize_role(role: Role) -> Role:
    if isinstance(role, RoleName):
        return role
    if isinstance(role, InverseRole):
        inner = normalize_role(role.role)
        if isinstance(inner, RoleName):
            return InverseRole(inner)
        return invert(inner)
    return Compose(normalize_role(role.first), normalize_role(role.second))


# -- concepts -----------------------------------------------------------------


@dataclass(frozen=True)
class Atomic:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Nominal:
    names: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.names:
            raise ValueError("a nominal needs at least one object name")
        object.__setattr__(self, "names", tuple(dict.fromkeys(self.names)))


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Not:
    inner: "Concept"


@dataclass(frozen=True)
class And:
    left: "Concept"
    right: "Concept"


@dataclass(frozen=True)
class AtLeast:
    n: int
    role: Role
    inner: "Concept"

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"qualified count must be a positive integer, got {self.n!r}")


# Negation-normal-form variants.


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Or:
    left: "Concept"
    right: "Concept"


@dataclass(frozen=True)
class AtMost:
    n: int
    role: Role
    inner: "Concept"

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 0:
            raise ValueError(f"count must be a non-negative integer, got {self.n!r}")


Concept = Union[Atomic, Nominal, Top, Not, And, AtLeast, Bottom, Or, AtMost]
TOP = Top()
BOTTOM = Bottom()


def bottom() -> Concept:
    return Not(TOP)


def union(left: Concept, right: Concept) -> Concept:
    return Not(And(Not(left), Not(right)))


def at_most(n: int, role: Role, inner: Concept) -> Concept:
    return Not(AtLeast(n + 1, role, inner))


def exists(role: Role, inner: Concept) -> Concept:
    return AtLeast(1, role, inner)


def forall(role: Role, inner: Concept) -> Concept:
    return Not(AtLeast(1, role, Not(inner)))


def exactly(n: int, role: Role, inner: Concept) -> Concept:
    upper = at_most(n, role, inner)
    return upper if n == 0 else And(upper, AtLeast(n, role, inner))


def conjoin(parts: Iterable[Concept]) -> Concept:
    parts = list(parts)
    if not parts:
        return TOP
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def subconcepts(c: Concept) -> Iterator[Concept]:
    yield c
    if isinstance(c, (And, Or)):
        yield from subconcepts(c.left)
        yield from subconcepts(c.right)
    elif isinstance(c, (Not, AtLeast, AtMost)):
        yield from subconcepts(c.inner)


def concept_names(c: Concept) -> Iterator[str]:
    for sub in subconcepts(c):
        if isinstance(sub, Atomic):
            yield sub.name


def object_names(c: Concept) -> Iterator[str]:
    for sub in subconcepts(c):
        if isinstance(sub, Nominal):
            yield from sub.names


def concept_roles(c: Concept) -> Iterator[Role]:
    for sub in subconcepts(c):
        if isinstance(sub, (AtLeast, AtMost)):
            yield sub.role


# -- negation normal form -----------------------------------------------------


def nnf(c: Concept) -> Concept:
    """Push negations down to atomic concepts and nominals."""
    if isinstance(c, (Atomic, Nominal, Top, Bottom)):
        return c
    if isinstance(c, And):
        return And(nnf(c.left), nnf(c.right))
    if isinstance(c, Or):
        return Or(nnf(c.left), nnf(c.right))
    if isinstance(c, AtLeast):
        return AtLeast(c.n, c.role, nnf(c.inner))
    if isinstance(c, AtMost):
        return AtMost(c.n, c.role, nnf(c.inner))
    if isinstance(c, Not):
        return nnf_not(c.inner)
    raise TypeError(f"not a concept: {c!r}")


def nnf_not(c: Concept) -> Concept:
    """NNF of ¬c."""
    if isinstance(c, (Atomic, Nominal)):
        return Not(c)
    if isinstance(c, Top):
        return BOTTOM
    if isinstance(c, Bottom):
        return TOP
    if isinstance(c, Not):
        return nnf(c.inner)
    if isinstance(c, And):
        return Or(nnf_not(c.left), nnf_not(c.right))
    if isinstance(c, Or):
        return And(nnf_not(c.left), nnf_not(c.right))
    if isinstance(c, AtLeast):
        return AtMost(c.n - 1, c.role, nnf(c.inner))
    if isinstance(c, AtMost):
        return AtLeast(c.n + 1, c.role, nnf(c.inner))
    raise TypeError(f"not a concept: {c!r}")


def is_nnf(c: Concept) -> bool:
    for sub in subconcepts(c):
        if isinstance(sub, Not) and not isinstance(sub.inner, (Atomic, Nominal)):
            return False
    return True


# -- axioms and knowledge bases -----------------------------------------------


@dataclass(frozen=True)
class Subsumption:
    sub: Concept
    sup: Concept
    origin: Optional[int] = None


@dataclass(frozen=True)
class ConceptAssertion:
    obj: str
    concept: Concept


@dataclass(frozen=True)
class RoleAssertion:
    subject: str
    obj: str
    role: Role


Axiom = Union[Subsumption, ConceptAssertion, RoleAssertion]


def equivalence(left: Concept, right: Concept, origin: int) -> tuple[Subsumption, Subsumption]:
    """``left ≡ right`` as two subsumptions sharing ``origin``."""
    return Subsumption(left, right, origin), Subsumption(right, left, origin)


def axiom_concepts(ax: Axiom) -> Iterator[Concept]:
    if isinstance(ax, Subsumption):
        yield ax.sub
        yield ax.sup
    elif isinstance(ax, ConceptAssertion):
        yield ax.concept


@dataclass(frozen=True)
class Signature:
    concepts: tuple[str, ...] = ()
    properties: tuple[str, ...] = ()
    objects: tuple[str, ...] = ()

    def merge(self, other: "Signature") -> "Signature":
        return Signature(
            tuple(dict.fromkeys(self.concepts + other.concepts)),
            tuple(dict.fromkeys(self.properties + other.properties)),
            tuple(dict.fromkeys(self.objects + other.objects)),
        )


def signature_of(axioms: Iterable[Axiom], extra: Iterable[Concept] = ()) -> Signature:
    concepts: dict[str, None] = {}
    props: dict[str, None] = {}
    objects: dict[str, None] = {}

    def visit(c: Concept) -> None:
        for sub in subconcepts(c):
            if isinstance(sub, Atomic):
                concepts.setdefault(sub.name)
            elif isinstance(sub, Nominal):
                for o in sub.names:
                    objects.setdefault(o)
            elif isinstance(sub, (AtLeast, AtMost)):
                for p in role_names(sub.role):
                    props.setdefault(p)

    for ax in axioms:
        if isinstance(ax, ConceptAssertion):
            objects.setdefault(ax.obj)
        elif isinstance(ax, RoleAssertion):
            objects.setdefault(ax.subject)
            objects.setdefault(ax.obj)
            for p in role_names(ax.role):
                props.setdefault(p)
        for c in axiom_concepts(ax):
            visit(c)
    for c in extra:
        visit(c)
    return Signature(tuple(concepts), tuple(props), tuple(objects))


class SignatureError(ValueError):
    pass


@dataclass(frozen=True)
class KnowledgeBase:
    signature: Signature
    axioms: tuple[Axiom, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "axioms", tuple(self.axioms))
        used = signature_of(self.axioms)
        sig = self.signature
        for kind, names, known in (
            ("concept", used.concepts, sig.concepts),
            ("property", used.properties, sig.properties),
            ("object", used.objects, sig.objects),
        ):
            missing = set(names) - set(known)
            if missing:
                raise SignatureError(f"{kind} name(s) missing from signature: {sorted(missing)}")

    @classmethod
    def build(cls, axioms: Iterable[Axiom], signature: Signature = Signature()) -> "KnowledgeBase":
        axioms = tuple(axioms)
        return cls(signature.merge(signature_of(axioms)), axioms)

    def extend(self, axioms: Iterable[Axiom]) -> "KnowledgeBase":
        return KnowledgeBase.build((*self.axioms, *axioms), self.signature)


# -- interpretations ----------------------------------------------------------


class UnknownName(KeyError):
    pass


@dataclass(frozen=True, eq=False)
class Interpretation:
    """A finite interpretation. Elements are arbitrary hashable labels."""

    universe: tuple
    objects: Mapping[str, object] = field(default_factory=dict)
    concepts: Mapping[str, frozenset] = field(default_factory=dict)
    roles: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self) -> None:
        universe = tuple(dict.fromkeys(self.universe))
        if not universe:
            raise ValueError("an interpretation needs a non-empty universe")
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "objects", dict(self.objects))
        object.__setattr__(self, "concepts", {k: frozenset(v) for k, v in self.concepts.items()})
        object.__setattr__(self, "roles", {k: frozenset(v) for k, v in self.roles.items()})
        elems = set(universe)
        for name, e in self.objects.items():
            if e not in elems:
                raise ValueError(f"object {name} maps outside the universe")
        for name, ext in self.concepts.items():
            if not ext <= elems:
                raise ValueError(f"concept {name} has elements outside the universe")
        for name, pairs in self.roles.items():
            for a, b in pairs:
                if a not in elems or b not in elems:
                    raise ValueError(f"role {name} has pairs outside the universe")

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Interpretation)
            and set(self.universe) == set(other.universe)
            and self.objects == other.objects
            and self.concepts == other.concepts
            and self.roles == other.roles
        )

    def __hash__(self) -> int:
        return hash((frozenset(self.universe), frozenset(self.objects.items())))

    def covers(self, sig: Signature) -> bool:
        return (
            set(sig.concepts) <= self.concepts.keys()
            and set(sig.properties) <= self.roles.keys()
            and set(sig.objects) <= self.objects.keys()
        )

    def padded(self, sig: Signature) -> "Interpretation":
        """Same interpretation with unmentioned concept/role names made empty."""
        concepts = dict(self.concepts)
        roles = dict(self.roles)
        for c in sig.concepts:
            concepts.setdefault(c, frozenset())
        for p in sig.properties:
            roles.setdefault(p, frozenset())
        return Interpretation(self.universe, self.objects, concepts, roles)

    def __repr__(self) -> str:
        return (
            f"Interpretation(universe={list(self.universe)}, objects={self.objects}, "
            f"concepts={ {k: sorted(map(str, v)) for k, v in self.concepts.items()} }, "
            f"roles={ {k: sorted(map(str, v)) for k, v in self.roles.items()} })"
        )


def interpret_role(interp: Interpretation, role: Role) -> frozenset:
    if isinstance(role, RoleName):
        try:
            return interp.roles[role.name]
        except KeyError:
            raise UnknownName(f"unknown role name {role.name!r}") from None
    if isinstance(role, InverseRole):
        return frozenset((b, a) for a, b in interpret_role(interp, role.role))
    if isinstance(role, Compose):
        left = interpret_role(interp, role.first)
        right = interpret_role(interp, role.second)
        by_start: dict = {}
        for a, b in right:
            by_start.setdefault(a, []).append(b)
        return frozenset((a, c) for a, b in left for c in by_start.get(b, ()))
    raise TypeError(f"not a role: {role!r}")


def _successor_counts(interp: Interpretation, role: Role, filler: frozenset) -> dict:
    counts: dict = {}
    for a, b in interpret_role(interp, role):
        if b in filler:
            counts[a] = counts.get(a, 0) + 1
    return counts


def interpret_concept(interp: Interpretation, c: Concept) -> frozenset:
    universe = frozenset(interp.universe)
    if isinstance(c, Top):
        return universe
    if isinstance(c, Bottom):
        return frozenset()
    if isinstance(c, Atomic):
        try:
            return interp.concepts[c.name]
        except KeyError:
            raise UnknownName(f"unknown concept name {c.name!r}") from None
    if isinstance(c, Nominal):
        try:
            return frozenset(interp.objects[o] for o in c.names)
        except KeyError as exc:
            raise UnknownName(f"unknown object name {exc.args[0]!r}") from None
    if isinstance(c, Not):
        return universe - interpret_concept(interp, c.inner)
    if isinstance(c, And):
        return interpret_concept(interp, c.left) & interpret_concept(interp, c.right)
    if isinstance(c, Or):
        return interpret_concept(interp, c.left) | interpret_concept(interp, c.right)
    if isinstance(c, AtLeast):
        counts = _successor_counts(interp, c.role, interpret_concept(interp, c.inner))
        return frozenset(e for e, k in counts.items() if k >= c.n)
    if isinstance(c, AtMost):
        counts = _successor_counts(interp, c.role, interpret_concept(interp, c.inner))
        return frozenset(e for e in universe if counts.get(e, 0) <= c.n)
    raise TypeError(f"not a concept: {c!r}")


def axiom_holds(interp: Interpretation, ax: Axiom) -> bool:
    if isinstance(ax, Subsumption):
        return interpret_concept(interp, ax.sub) <= interpret_concept(interp, ax.sup)
    if isinstance(ax, ConceptAssertion):
        return _object(interp, ax.obj) in interpret_concept(interp, ax.concept)
    if isinstance(ax, RoleAssertion):
        pair = (_object(interp, ax.subject), _object(interp, ax.obj))
        return pair in interpret_role(interp, ax.role)
    raise TypeError(f"not an axiom: {ax!r}")


def _object(interp: Interpretation, name: str):
    try:
        return interp.objects[name]
    except KeyError:
        raise UnknownName(f"unknown object name {name!r}") from None


@dataclass(frozen=True)
class ModelCheck:
    ok: bool
    failing: Optional[Axiom] = None

    def __bool__(self) -> bool:
        return self.ok


def check_model(interp: Interpretation, kb: KnowledgeBase) -> ModelCheck:
    if not interp.covers(kb.signature):
        raise SignatureError("interpretation does not cover the knowledge base signature")
    for ax in kb.axioms:
        if not axiom_holds(interp, ax):
            return ModelCheck(False, ax)
    return ModelCheck(True)


def unique_names(interp: Interpretation, names: Iterable[str]) -> bool:
    images = [interp.objects[n] for n in names]
    return len(images) == len(set(images))


# -- fragment of the logic ----------------------------------------------------

ALCOQ = "ALCOQ"
SROIQ_EXPRESSIBLE = "SROIQ-expressible"
ALCOIQ_COMPOSITION = "ALCOIQ-with-composition"


def _has(role: Role, kind) -> bool:
    if isinstance(role, kind):
        return True
    if isinstance(role, InverseRole):
        return _has(role.role, kind)
    if isinstance(role, Compose):
        return _has(role.first, kind) or _has(role.second, kind)
    return False


def _restriction_roles(kb: KnowledgeBase) -> Iterator[tuple[int, Role, bool]]:
    """(count, role, is_at_most) for every qualified restriction in ``kb``."""
    for ax in kb.axioms:
        if isinstance(ax, RoleAssertion):
            yield 1, ax.role, False
        for c in axiom_concepts(ax):
            for sub in subconcepts(c):
                if isinstance(sub, AtLeast):
                    yield sub.n, sub.role, False
                elif isinstance(sub, AtMost):
                    yield sub.n, sub.role, True


def dl_fragment(kb: KnowledgeBase) -> str:
    """ALCOQ, SROIQ-expressible or ALCOIQ-with-composition.

    A composition under ``≥1`` (or its dual ``≤0``) unfolds exactly into
    nested existentials, so it stays within SROIQ; counting over a
    composition does not.
    """
    inverse = compose = counting_compose = False
    for n, role, at_most_form in _restriction_roles(kb):
        inverse |= _has(role, InverseRole)
        if _has(role, Compose):
            compose = True
            if (n != 0) if at_most_form else (n != 1):
                counting_compose = True
    if counting_compose:
        return ALCOIQ_COMPOSITION
    if inverse or compose:
        return SROIQ_EXPRESSIBLE
    return ALCOQ


def expand_composition(c: Concept) -> Concept:
    """Unfold ``≥1 (r∘s).C`` into ``≥1 r.≥1 s.C`` throughout ``c``.

    Raises ValueError on counting over a composition.
    """
    if isinstance(c, (Atomic, Nominal, Top, Bottom)):
        return c
    if isinstance(c, Not):
        return Not(expand_composition(c.inner))
    if isinstance(c, (And, Or)):
        return type(c)(expand_composition(c.left), expand_composition(c.right))
    if isinstance(c, (AtLeast, AtMost)):
        inner = expand_composition(c.inner)
        role = normalize_role(c.role)
        if not isinstance(role, Compose):
            return type(c)(c.n, role, inner)
        if isinstance(c, AtLeast) and c.n == 1:
            return _chain_exists(role, inner)
        if isinstance(c, AtMost) and c.n == 0:
            return Not(_chain_exists(role, inner))
        raise ValueError("counting over a role composition has no exact unfolding")
    raise TypeError(f"not a concept: {c!r}")


def _chain_exists(role: Role, inner: Concept) -> Concept:
    if isinstance(role, Compose):
        return _chain_exists(role.first, _chain_exists(role.second, inner))
    return AtLeast(1, role, inner)


def enumerate_interpretations(sig: Signature, size: int) -> Iterator[Interpretation]:
    """Every interpretation of ``sig`` over ``range(size)`` (tests only; tiny)."""
    universe = tuple(range(size))
    pairs = [(a, b) for a in universe for b in universe]
    subsets = [frozenset(s) for k in range(size + 1) for s in itertools.combinations(universe, k)]
    relations = [
        frozenset(s) for k in range(len(pairs) + 1) for s in itertools.combinations(pairs, k)
    ]
    for objs in itertools.product(universe, repeat=len(sig.objects)):
        for concs in itertools.product(subsets, repeat=len(sig.concepts)):
            for rels in itertools.product(relations, repeat=len(sig.properties)):
                yield Interpretation(
                    universe,
                    dict(zip(sig.objects, objs)),
                    dict(zip(sig.concepts, concs)),
                    dict(zip(sig.properties, rels)),
                )
