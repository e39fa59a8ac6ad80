"""Evaluation of paths, constraints and targets; faithful assignments.

Conformance asks for *some* faithful assignment. Small instances are searched
exhaustively (a pruned depth-first walk over the bit space, yielding results
in canonical order). Larger instances fall back to a per-stratum fixpoint when
the shape set is stratified.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .model import (
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
    ShapeRef,
    ShapeSet,
    SubjectsOf,
    TargetQuery,
    Top,
    TYPE,
)

DEFAULT_MAX_BITS = 20

# -- paths --------------------------------------------------------------------


def eval_path(graph: RdfGraph, path: PathExpr) -> frozenset[tuple[str, str]]:
    if isinstance(path, Prop):
        return frozenset((s, o) for s, p, o in graph.triples if p == path.name)
    if isinstance(path, Inverse):
        return frozenset((b, a) for a, b in eval_path(graph, path.path))
    if isinstance(path, Seq):
        left = eval_path(graph, path.first)
        right = eval_path(graph, path.second)
        by_start: dict[str, list[str]] = {}
        for a, b in right:
            by_start.setdefault(a, []).append(b)
        return frozenset((a, c) for a, b in left for c in by_start.get(b, ()))
    raise TypeError(f"not a path: {path!r}")


class _PathCache:
    """Successor lists per (graph, path), computed once per search."""

    def __init__(self, graph: RdfGraph) -> None:
        self.graph = graph
        self._succ: dict[PathExpr, dict[str, tuple[str, ...]]] = {}

    def successors(self, path: PathExpr, v: str) -> tuple[str, ...]:
        table = self._succ.get(path)
        if table is None:
            acc: dict[str, list[str]] = {}
            for a, b in eval_path(self.graph, path):
                acc.setdefault(a, []).append(b)
            order = self.graph.order
            table = {a: tuple(sorted(bs, key=order.__getitem__)) for a, bs in acc.items()}
            self._succ[path] = table
        return table.get(v, ())


# -- constraints --------------------------------------------------------------


def eval_constraint(
    graph: RdfGraph,
    sigma: Assignment,
    v: str,
    phi: Constraint,
    *,
    _paths: Optional[_PathCache] = None,
) -> bool:
    if v not in graph.node_set:
        raise ValueError(f"node {v!r} is not in the data graph")
    return _eval(phi, v, sigma, _paths or _PathCache(graph))


def _eval(phi: Constraint, v: str, sigma, paths: _PathCache) -> bool:
    if isinstance(phi, Top):
        return True
    if isinstance(phi, ShapeRef):
        return phi.name in sigma[v]
    if isinstance(phi, NodeConst):
        return v == phi.node
    if isinstance(phi, And):
        return _eval(phi.left, v, sigma, paths) and _eval(phi.right, v, sigma, paths)
    if isinstance(phi, Not):
        return not _eval(phi.inner, v, sigma, paths)
    if isinstance(phi, AtLeast):
        count = 0
        for w in paths.successors(phi.path, v):
            if _eval(phi.inner, w, sigma, paths):
                count += 1
                if count >= phi.n:
                    return True
        return False
    raise TypeError(f"not a core constraint: {phi!r}")


def _eval3(phi: Constraint, v: str, bits: dict, paths: _PathCache) -> Optional[bool]:
    """Kleene evaluation; ``bits`` maps (node, shape) to a bool when decided."""
    if isinstance(phi, Top):
        return True
    if isinstance(phi, ShapeRef):
        return bits.get((v, phi.name))
    if isinstance(phi, NodeConst):
        return v == phi.node
    if isinstance(phi, And):
        left = _eval3(phi.left, v, bits, paths)
        if left is False:
            return False
        right = _eval3(phi.right, v, bits, paths)
        if right is False:
            return False
        if left is True and right is True:
            return True
        return None
    if isinstance(phi, Not):
        inner = _eval3(phi.inner, v, bits, paths)
        return None if inner is None else not inner
    if isinstance(phi, AtLeast):
        sure = maybe = 0
        for w in paths.successors(phi.path, v):
            r = _eval3(phi.inner, w, bits, paths)
            if r is True:
                sure += 1
                if sure >= phi.n:
                    return True
            elif r is None:
                maybe += 1
        if sure + maybe < phi.n:
            return False
        return None
    raise TypeError(f"not a core constraint: {phi!r}")


# -- targets ------------------------------------------------------------------


def eval_target(graph: RdfGraph, q: TargetQuery) -> frozenset[str]:
    if isinstance(q, NoTarget):
        return frozenset()
    if isinstance(q, Nodes):
        return frozenset(q.nodes)
    if isinstance(q, ClassTarget):
        return frozenset(s for s, p, o in graph.triples if p == TYPE and o == q.cls)
    if isinstance(q, SubjectsOf):
        return frozenset(s for s, p, _ in graph.triples if p == q.prop)
    if isinstance(q, ObjectsOf):
        return frozenset(o for _, p, o in graph.triples if p == q.prop)
    raise TypeError(f"not a target query: {q!r}")


# -- faithfulness -------------------------------------------------------------


def _check_total(graph: RdfGraph, sigma: Assignment) -> None:
    if set(sigma) != graph.node_set:
        missing = sorted(graph.node_set - set(sigma))
        extra = sorted(set(sigma) - graph.node_set)
        raise ValueError(f"assignment is not total over the graph (missing {missing}, extra {extra})")


def faithfulness_violations(
    graph: RdfGraph,
    shapes: ShapeSet,
    sigma: Assignment,
    *,
    erratum: bool = True,
) -> list[str]:
    """Human-readable reasons why ``sigma`` is not faithful (empty if it is).

    With ``erratum=False`` the target condition only ranges over graph nodes,
    reproducing the originally published definition.
    """
    _check_total(graph, sigma)
    paths = _PathCache(graph)
    out: list[str] = []
    for shape in shapes:
        for v in eval_target(graph, shape.target):
            if v not in graph.node_set:
                if erratum:
                    out.append(f"target node {v} missing from data graph (shape {shape.name})")
            elif shape.name not in sigma[v]:
                out.append(f"target node {v} is not assigned shape {shape.name}")
        for v in graph.nodes:
            holds = _eval(shape.constraint, v, sigma, paths)
            assigned = shape.name in sigma[v]
            if holds and not assigned:
                out.append(f"node {v} satisfies the constraint of {shape.name} but is not assigned it")
            elif assigned and not holds:
                out.append(f"node {v} is assigned {shape.name} but violates its constraint")
    return out


def is_faithful(graph: RdfGraph, shapes: ShapeSet, sigma: Assignment, *, erratum: bool = True) -> bool:
    _check_total(graph, sigma)
    paths = _PathCache(graph)
    for shape in shapes:
        for v in eval_target(graph, shape.target):
            if v not in graph.node_set:
                if erratum:
                    return False
            elif shape.name not in sigma[v]:
                return False
        for v in graph.nodes:
            if _eval(shape.constraint, v, sigma, paths) != (shape.name in sigma[v]):
                return False
    return True


def missing_targets(graph: RdfGraph, shapes: ShapeSet) -> list[tuple[str, str]]:
    """(node, shape) pairs where an enumerated target is absent from the graph."""
    out = []
    for shape in shapes:
        if isinstance(shape.target, Nodes):
            out += [(v, shape.name) for v in shape.target.nodes if v not in graph.node_set]
    return out


# -- stratification -----------------------------------------------------------


@dataclass(frozen=True)
class StratificationReport:
    ok: bool
    edges: tuple[tuple[str, str, str], ...]
    cycle: Optional[tuple[str, ...]] = None


def _ref_polarities(phi: Constraint, negated: bool = False):
    if isinstance(phi, ShapeRef):
        yield phi.name, negated
    elif isinstance(phi, And):
        yield from _ref_polarities(phi.left, negated)
        yield from _ref_polarities(phi.right, negated)
    elif isinstance(phi, Not):
        yield from _ref_polarities(phi.inner, not negated)
    elif isinstance(phi, AtLeast):
        yield from _ref_polarities(phi.inner, negated)


def dependency_edges(shapes: ShapeSet) -> tuple[tuple[str, str, str], ...]:
    edges: dict[tuple[str, str, str], None] = {}
    for shape in shapes:
        for ref, negated in _ref_polarities(shape.constraint):
            edges.setdefault((shape.name, ref, "negative" if negated else "positive"))
    return tuple(edges)


def _sccs(names: tuple[str, ...], succ: dict[str, list[str]]) -> list[list[str]]:
    """Tarjan's algorithm; components come out dependencies-first."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    stack: list[str] = []
    on_stack: set[str] = set()
    out: list[list[str]] = []
    counter = 0

    def visit(root: str) -> None:
        nonlocal counter
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(succ[nxt])))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                out.append(sorted(comp, key=names.index))

    for name in names:
        if name not in index:
            visit(name)
    return out


def _strata(shapes: ShapeSet, edges) -> list[list[str]]:
    succ: dict[str, list[str]] = {n: [] for n in shapes.names}
    for s, t, _ in edges:
        succ[s].append(t)
    return _sccs(shapes.names, succ)


def check_stratified(shapes: ShapeSet) -> StratificationReport:
    edges = dependency_edges(shapes)
    comp_of = {}
    for i, comp in enumerate(_strata(shapes, edges)):
        for name in comp:
            comp_of[name] = i
    for s, t, polarity in edges:
        if polarity == "negative" and comp_of[s] == comp_of[t]:
            return StratificationReport(False, edges, _cycle_through(edges, s, t, comp_of))
    return StratificationReport(True, edges, None)


def _cycle_through(edges, s: str, t: str, comp_of) -> tuple[str, ...]:
    """Shortest cycle s → t → … → s inside one component."""
    if s == t:
        return (s,)
    succ: dict[str, list[str]] = {}
    for a, b, _ in edges:
        if comp_of[a] == comp_of[s] and comp_of[b] == comp_of[s]:
            succ.setdefault(a, []).append(b)
    prev = {t: None}
    queue = [t]
    while queue:
        node = queue.pop(0)
        if node == s:
            break
        for nxt in succ.get(node, ()):
            if nxt not in prev:
                prev[nxt] = node
                queue.append(nxt)
    path = []
    node = s
    while node is not None:
        path.append(node)
        node = prev[node]
    path.reverse()  # t ... s
    return (s, *path[:-1])


# -- searching for faithful assignments ---------------------------------------


class SearchTooLarge(RuntimeError):
    """Neither exhaustive search nor the fixpoint strategy can settle the query."""


@dataclass(frozen=True)
class FaithfulSearch:
    assignments: list[Assignment] = field(default_factory=list)
    strategy: str = "exhaustive"

    def __bool__(self) -> bool:
        return bool(self.assignments)


def find_faithful(
    graph: RdfGraph,
    shapes: ShapeSet,
    limit: int = 1,
    *,
    max_bits: int = DEFAULT_MAX_BITS,
    erratum: bool = True,
) -> FaithfulSearch:
    """Up to ``limit`` faithful assignments, in canonical order.

    Canonical order reads an assignment as a bit string over (node, shape)
    pairs, nodes in graph order and shapes in set order, with "absent"
    sorting before "present".
    """
    if limit < 1:
        raise ValueError("limit must be positive")
    if erratum and missing_targets(graph, shapes):
        return FaithfulSearch([], "target-check")
    bits = len(graph.nodes) * len(shapes)
    if bits <= max_bits:
        return FaithfulSearch(list(_exhaustive(graph, shapes, limit, erratum)), "exhaustive")
    return FaithfulSearch(_fixpoint(graph, shapes, erratum), "fixpoint")


def _exhaustive(graph: RdfGraph, shapes: ShapeSet, limit: int, erratum: bool):
    paths = _PathCache(graph)
    shape_list = list(shapes)
    order = [(v, sh) for v in graph.nodes for sh in shape_list]
    forced: set[tuple[str, str]] = set()
    for sh in shape_list:
        for v in eval_target(graph, sh.target):
            if v in graph.node_set:
                forced.add((v, sh.name))
    bits: dict[tuple[str, str], bool] = {}

    def consistent() -> bool:
        for (v, name), value in bits.items():
            r = _eval3(shapes[name].constraint, v, bits, paths)
            if r is not None and r != value:
                return False
        return True

    def walk(i: int):
        if i == len(order):
            yield Assignment(
                {v: frozenset(n for n in shapes.names if bits[(v, n)]) for v in graph.nodes}
            )
            return
        v, sh = order[i]
        key = (v, sh.name)
        for value in (False, True):
            if not value and key in forced:
                continue
            bits[key] = value
            if consistent():
                yield from walk(i + 1)
            del bits[key]

    for count, sigma in enumerate(walk(0), 1):
        yield sigma
        if count >= limit:
            return


def _fixpoint(graph: RdfGraph, shapes: ShapeSet, erratum: bool) -> list[Assignment]:
    report = check_stratified(shapes)
    if not report.ok:
        raise SearchTooLarge(
            f"graph too large for exhaustive search ({len(graph.nodes)} nodes x "
            f"{len(shapes)} shapes) and the shape set is not stratified"
        )
    paths = _PathCache(graph)
    current: dict[str, set[str]] = {v: set() for v in graph.nodes}
    for stratum in _strata(shapes, report.edges):
        for v in graph.nodes:
            current[v].update(stratum)
        changed = True
        while changed:
            changed = False
            for name in stratum:
                phi = shapes[name].constraint
                for v in graph.nodes:
                    if name in current[v] and not _eval(phi, v, current, paths):
                        current[v].discard(name)
                        changed = True
    sigma = Assignment(current)
    if is_faithful(graph, shapes, sigma, erratum=erratum):
        return [sigma]
    monotone = all(p == "positive" for _, _, p in report.edges)
    if monotone:
        # The greatest fixpoint contains every faithful assignment, so a
        # target it misses is missed by all of them.
        return []
    raise SearchTooLarge(
        "graph too large for exhaustive search and the fixpoint assignment "
        "misses a target; negation between strata makes this inconclusive"
    )


def conforms(graph: RdfGraph, shapes: ShapeSet, **kwargs) -> bool:
    return bool(find_faithful(graph, shapes, 1, **kwargs).assignments)
