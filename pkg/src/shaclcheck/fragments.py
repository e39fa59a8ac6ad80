"""Language fragments of a shape set.

``LNoInv``: only bare properties under counting, no ``objectsOf`` targets.
``LRestr``: inverse and sequence paths only under ``≥1`` (an existential);
higher counts use bare properties. ``LFull``: anything else.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Optional

from .model import And, AtLeast, Constraint, Not, ObjectsOf, Prop, ShapeSet


class FragmentKind(enum.IntEnum):
    LNoInv = 0
    LRestr = 1
    LFull = 2


@dataclass(frozen=True)
class Witness:
    shape: str
    location: str
    construct: str


@dataclass(frozen=True)
class Fragment:
    kind: FragmentKind
    witness: Optional[Witness] = None

    @property
    def name(self) -> str:
        return self.kind.name


def _restrictions(phi: Constraint, where: str) -> Iterator[tuple[str, AtLeast]]:
    if isinstance(phi, AtLeast):
        yield where, phi
        yield from _restrictions(phi.inner, where + ".inner")
    elif isinstance(phi, And):
        yield from _restrictions(phi.left, where + ".left")
        yield from _restrictions(phi.right, where + ".right")
    elif isinstance(phi, Not):
        yield from _restrictions(phi.inner, where + ".inner")


def _violations(shapes: ShapeSet) -> Iterator[tuple[FragmentKind, Witness]]:
    """Each construct with the tightest fragment it forces."""
    for shape in shapes:
        if isinstance(shape.target, ObjectsOf):
            yield FragmentKind.LRestr, Witness(shape.name, "target", f"objectsOf {shape.target.prop}")
        for where, r in _restrictions(shape.constraint, "constraint"):
            if isinstance(r.path, Prop):
                continue
            construct = f"≥{r.n} over path {r.path}"
            kind = FragmentKind.LRestr if r.n == 1 else FragmentKind.LFull
            yield kind, Witness(shape.name, where, construct)


def classify(shapes: ShapeSet) -> Fragment:
    worst = FragmentKind.LNoInv
    witness: Optional[Witness] = None
    for kind, w in _violations(shapes):
        if kind > worst:
            worst, witness = kind, w
    return Fragment(worst, witness)
