"""Random shape sets, graphs and assignments for property tests."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from oracle import faithful_assignments
from shaclcheck.model import (
    And,
    Assignment,
    AtLeast,
    AtMost,
    Exactly,
    Exists,
    Forall,
    Inverse,
    NO_TARGET,
    NodeConst,
    Nodes,
    Not,
    ObjectsOf,
    Or,
    Prop,
    RdfGraph,
    Seq,
    Shape,
    ShapeRef,
    ShapeSet,
    SubjectsOf,
    TOP,
)


def random_path(rng: random.Random, props, inverse: bool):
    if not inverse:
        return Prop(rng.choice(props))
    r = rng.random()
    if r < 0.5:
        return Prop(rng.choice(props))
    if r < 0.75:
        return Inverse(Prop(rng.choice(props)))
    return Seq(random_path(rng, props, False), random_path(rng, props, True))


def random_constraint(rng: random.Random, depth: int, names, props, consts, inverse=False):
    """A constraint of nesting depth ≤ ``depth`` using derived operators too."""
    leaves = [lambda: TOP, lambda: ShapeRef(rng.choice(names))]
    if consts:
        leaves.append(lambda: NodeConst(rng.choice(consts)))
    if depth == 0:
        return rng.choice(leaves)()
    sub = lambda: random_constraint(rng, depth - 1, names, props, consts, inverse)  # noqa: E731
    path = lambda: random_path(rng, props, inverse)  # noqa: E731
    builders = [
        lambda: rng.choice(leaves)(),
        lambda: And(sub(), sub()),
        lambda: Or(sub(), sub()),
        lambda: Not(sub()),
        lambda: AtLeast(rng.choice((1, 1, 2)), path(), sub()),
        lambda: AtMost(rng.choice((0, 1)), path(), sub()),
        lambda: Exactly(1, path(), sub()),
        lambda: Forall(path(), sub()),
        lambda: Exists(path(), sub()),
    ]
    return rng.choice(builders)()


def random_target(rng: random.Random, props, consts, inverse=False):
    options = [lambda: NO_TARGET, lambda: NO_TARGET, lambda: SubjectsOf(rng.choice(props))]
    if consts:
        options.append(lambda: Nodes((rng.choice(consts),)))
    if inverse:
        options.append(lambda: ObjectsOf(rng.choice(props)))
    return rng.choice(options)()


def random_shape_set(
    rng: random.Random,
    n_shapes: int = 3,
    depth: int = 2,
    props=("p",),
    consts=("a",),
    inverse: bool = False,
) -> ShapeSet:
    names = ["A", "B", "C", "D"][:n_shapes]
    return ShapeSet(
        Shape(
            name,
            random_constraint(rng, depth, names, list(props), list(consts), inverse),
            random_target(rng, list(props), list(consts), inverse),
        )
        for name in names
    )


@st.composite
def shape_sets(draw, n_shapes=(1, 3), depth=2, props=("p",), consts=("a",), inverse=False):
    seed = draw(st.integers(0, 2**32 - 1))
    k = draw(st.integers(*n_shapes))
    return random_shape_set(random.Random(seed), k, depth, props, consts, inverse)


def random_graph(rng: random.Random, props=("p", "q"), named=("a",), max_nodes: int = 3):
    """A graph with 1..max_nodes nodes."""
    k = rng.randint(1, max_nodes)
    nodes = [v for v in named if rng.random() < 0.5][:k]
    nodes += [f"f{i}" for i in range(1, k - len(nodes) + 1)]
    density = rng.choice((0.2, 0.35, 0.5))
    triples = frozenset(
        (x, p, y) for p in props for x in nodes for y in nodes if rng.random() < density
    )
    return RdfGraph(tuple(nodes), triples)


def conforming_corpus(count: int, seed: int = 0, inverse: bool = True):
    """``count`` triples (graph, σ, shapes) with σ faithful per the oracle.

    Shape sets have at most 2 shapes of depth ≤ 2 over properties p and q;
    graphs have at most 3 nodes.
    """
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        shapes = random_shape_set(rng, rng.choice((1, 2)), 2, ("p", "q"), ("a",), inverse)
        for _ in range(6):
            g = random_graph(rng)
            sigmas = faithful_assignments(g.nodes, g.triples, shapes)
            if sigmas:
                out.append((g, Assignment(rng.choice(sigmas)), shapes))
                break
    return out
