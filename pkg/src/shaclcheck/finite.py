"""Bounded finite-model search through SAT.

For each universe size ``n = 1, 2, …`` the knowledge base and the goal
concept are grounded over elements ``0..n-1`` into CNF. The first satisfiable
size wins; among its models the lexicographically least one (in a fixed
variable order, false before true) is returned, so results are canonical.
Element 0 is required to be an instance of the goal, which is harmless up to
renaming and prunes symmetric search.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from pysat.solvers import Solver

from . import dl

SOLVER = "cadical153"


class _Grounding:
    def __init__(self, size: int) -> None:
        self.size = size
        self.nvars = 0
        self.clauses: list[list[int]] = []
        self.true = self.new()
        self.clauses.append([self.true])
        self._role_cache: dict = {}
        self._concept_cache: dict = {}
        self.objects: dict[str, list[int]] = {}
        self.concepts: dict[str, list[int]] = {}
        self.roles: dict[str, list[list[int]]] = {}

    def new(self) -> int:
        self.nvars += 1
        return self.nvars

    # -- Tseitin helpers

    def conj(self, lits: list[int]) -> int:
        if not lits:
            return self.true
        if len(lits) == 1:
            return lits[0]
        x = self.new()
        for lit in lits:
            self.clauses.append([-x, lit])
        self.clauses.append([x] + [-lit for lit in lits])
        return x

    def disj(self, lits: list[int]) -> int:
        if not lits:
            return -self.true
        if len(lits) == 1:
            return lits[0]
        x = self.new()
        for lit in lits:
            self.clauses.append([x, -lit])
        self.clauses.append([-x] + lits)
        return x

    def at_least(self, lits: list[int], n: int) -> int:
        """Literal equivalent to "at least ``n`` of ``lits`` hold"."""
        if n <= 0:
            return self.true
        if n > len(lits):
            return -self.true
        # prev[j] <-> at least j of the literals seen so far hold (j = 1..n)
        prev = [self.true] + [-self.true] * n
        for lit in lits:
            cur = [self.true]
            for j in range(1, n + 1):
                cur.append(self.disj([prev[j], self.conj([prev[j - 1], lit])]))
            prev = cur
        return prev[n]

    # -- vocabulary

    def declare(self, sig: dl.Signature, unique: Iterable[str]) -> None:
        n = self.size
        for o in sig.objects:
            row = [self.new() for _ in range(n)]
            self.objects[o] = row
            self.clauses.append(row[:])
            for i in range(n):
                for j in range(i + 1, n):
                    self.clauses.append([-row[i], -row[j]])
        for a in sig.concepts:
            self.concepts[a] = [self.new() for _ in range(n)]
        for p in sig.properties:
            self.roles[p] = [[self.new() for _ in range(n)] for _ in range(n)]
        unique = [o for o in dict.fromkeys(unique) if o in self.objects]
        for e in range(n):
            for i, o1 in enumerate(unique):
                for o2 in unique[i + 1:]:
                    self.clauses.append([-self.objects[o1][e], -self.objects[o2][e]])

    def decision_vars(self) -> list[int]:
        out: list[int] = []
        for row in self.objects.values():
            out += row
        for row in self.concepts.values():
            out += row
        for matrix in self.roles.values():
            for row in matrix:
                out += row
        return out

    # -- roles and concepts

    def role(self, r: dl.Role, a: int, b: int) -> int:
        if isinstance(r, dl.RoleName):
            return self.roles[r.name][a][b]
        if isinstance(r, dl.InverseRole):
            return self.role(r.role, b, a)
        key = (r, a, b)
        if key not in self._role_cache:
            self._role_cache[key] = self.disj(
                [self.conj([self.role(r.first, a, m), self.role(r.second, m, b)]) for m in range(self.size)]
            )
        return self._role_cache[key]

    def concept(self, c: dl.Concept, e: int) -> int:
        key = (c, e)
        hit = self._concept_cache.get(key)
        if hit is not None:
            return hit
        if isinstance(c, dl.Top):
            lit = self.true
        elif isinstance(c, dl.Bottom):
            lit = -self.true
        elif isinstance(c, dl.Atomic):
            lit = self.concepts[c.name][e]
        elif isinstance(c, dl.Nominal):
            lit = self.disj([self.objects[o][e] for o in c.names])
        elif isinstance(c, dl.Not):
            lit = -self.concept(c.inner, e)
        elif isinstance(c, dl.And):
            lit = self.conj([self.concept(c.left, e), self.concept(c.right, e)])
        elif isinstance(c, dl.Or):
            lit = self.disj([self.concept(c.left, e), self.concept(c.right, e)])
        elif isinstance(c, (dl.AtLeast, dl.AtMost)):
            fillers = [
                self.conj([self.role(c.role, e, b), self.concept(c.inner, b)]) for b in range(self.size)
            ]
            if isinstance(c, dl.AtLeast):
                lit = self.at_least(fillers, c.n)
            else:
                lit = -self.at_least(fillers, c.n + 1)
        else:
            raise TypeError(f"not a concept: {c!r}")
        self._concept_cache[key] = lit
        return lit

    def axiom(self, ax: dl.Axiom) -> None:
        n = self.size
        if isinstance(ax, dl.Subsumption):
            for e in range(n):
                self.clauses.append([-self.concept(ax.sub, e), self.concept(ax.sup, e)])
        elif isinstance(ax, dl.ConceptAssertion):
            for e in range(n):
                self.clauses.append([-self.objects[ax.obj][e], self.concept(ax.concept, e)])
        elif isinstance(ax, dl.RoleAssertion):
            for a in range(n):
                for b in range(n):
                    self.clauses.append(
                        [-self.objects[ax.subject][a], -self.objects[ax.obj][b], self.role(ax.role, a, b)]
                    )
        else:
            raise TypeError(f"not an axiom: {ax!r}")


@dataclass
class SearchStats:
    sizes_tried: int = 0
    sat_calls: int = 0


def _decode(g: _Grounding, model: set[int]) -> dl.Interpretation:
    universe = tuple(range(g.size))
    objects = {o: next(e for e in universe if row[e] in model) for o, row in g.objects.items()}
    concepts = {a: frozenset(e for e in universe if row[e] in model) for a, row in g.concepts.items()}
    roles = {
        p: frozenset((a, b) for a in universe for b in universe if m[a][b] in model)
        for p, m in g.roles.items()
    }
    return dl.Interpretation(universe, objects, concepts, roles)


def bounded_model_search(
    kb: dl.KnowledgeBase,
    goal: dl.Concept,
    max_universe: int,
    *,
    min_universe: int = 1,
    unique_names: Iterable[str] = (),
    tidy: bool = False,
    stats: Optional[SearchStats] = None,
) -> Optional[dl.Interpretation]:
    """Least model of ``kb`` with a ``goal`` instance and ≤ ``max_universe``
    elements, or None if there is none within the bound.

    Object names listed in ``unique_names`` must denote distinct elements.
    With ``tidy``, once some model is known to exist, models whose goal
    instance is unnamed and whose roles have no self-loops are preferred
    (smallest such within the bound); they make more readable
    counterexamples. Otherwise the plain least model is returned.
    """
    if max_universe < 1:
        raise ValueError("max_universe must be at least 1")
    stats = stats if stats is not None else SearchStats()
    sig = kb.signature.merge(dl.signature_of((), [goal]))
    unique = tuple(unique_names)
    for name in unique:
        if name not in sig.objects:
            sig = sig.merge(dl.Signature(objects=(name,)))
    found = None
    for size in range(max(1, min_universe, len(set(unique))), max_universe + 1):
        found = _search_size(kb, sig, goal, size, unique, False, stats)
        if found is not None:
            break
    if found is None or not tidy:
        return found
    for size in range(len(found.universe), max_universe + 1):
        nicer = _search_size(kb, sig, goal, size, unique, True, stats)
        if nicer is not None:
            return nicer
    return found


def _search_size(kb, sig, goal, size, unique, tidy, stats) -> Optional[dl.Interpretation]:
    stats.sizes_tried += 1
    g = _Grounding(size)
    g.declare(sig, unique)
    for ax in kb.axioms:
        g.axiom(ax)
    g.clauses.append([g.concept(goal, 0)])
    if tidy:
        for row in g.objects.values():
            g.clauses.append([-row[0]])
        for matrix in g.roles.values():
            for e in range(size):
                g.clauses.append([-matrix[e][e]])
    with Solver(name=SOLVER, bootstrap_with=g.clauses) as solver:
        stats.sat_calls += 1
        if not solver.solve():
            return None
        fixed: list[int] = []
        model = set(solver.get_model())
        for v in g.decision_vars():
            if -v in model:
                fixed.append(-v)
                continue
            stats.sat_calls += 1
            if solver.solve(assumptions=fixed + [-v]):
                model = set(solver.get_model())
                fixed.append(-v)
            else:
                fixed.append(v)
        interp = _decode(g, model)
    check = dl.check_model(interp, kb)
    if not check or not dl.interpret_concept(interp, goal):
        raise RuntimeError(f"bounded search produced a non-model (fails {check.failing})")
    if unique and not dl.unique_names(interp, unique):
        raise RuntimeError("bounded search violated the unique-name requirement")
    return interp
