"""Tableau satisfiability for ALCOQ (nominals, qualified number restrictions,
no inverse roles, no role composition) under general concept inclusions.

Every inclusion C ⊑ D is internalised as ¬C ⊔ D in every node label. The
completion graph has one nominal node per object name plus the root; tree
nodes are blocked by an ancestor with an equal label. A clash-free complete
graph is unravelled into a finite interpretation: directly blocked nodes copy
the outgoing edges of their blocker. That interpretation is model-checked
before it is returned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from . import dl
from .finite import bounded_model_search

# concept kinds in the interned table
TOP, BOT, ATOM, NATOM, NOM, NNOM, AND, OR, GE, LE = range(10)


class FragmentError(ValueError):
    """The input uses inverse roles or role composition."""


class TableauBudgetExceeded(RuntimeError):
    pass


class _Table:
    """Interned NNF concepts; labels are sets of integer ids."""

    def __init__(self) -> None:
        self.ids: dict[dl.Concept, int] = {}
        self.concepts: list[dl.Concept] = []
        self.kind: list[int] = []
        self.args: list[tuple] = []
        self._neg: dict[int, int] = {}

    def intern(self, c: dl.Concept) -> int:
        hit = self.ids.get(c)
        if hit is not None:
            return hit
        if isinstance(c, dl.Top):
            entry = (TOP, ())
        elif isinstance(c, dl.Bottom):
            entry = (BOT, ())
        elif isinstance(c, dl.Atomic):
            entry = (ATOM, (c.name,))
        elif isinstance(c, dl.Nominal):
            entry = (NOM, c.names)
        elif isinstance(c, dl.Not) and isinstance(c.inner, dl.Atomic):
            entry = (NATOM, (c.inner.name,))
        elif isinstance(c, dl.Not) and isinstance(c.inner, dl.Nominal):
            entry = (NNOM, c.inner.names)
        elif isinstance(c, dl.And):
            entry = (AND, (self.intern(c.left), self.intern(c.right)))
        elif isinstance(c, dl.Or):
            entry = (OR, (self.intern(c.left), self.intern(c.right)))
        elif isinstance(c, (dl.AtLeast, dl.AtMost)):
            if not isinstance(c.role, dl.RoleName):
                raise FragmentError(f"role {c.role} is outside ALCOQ")
            kind = GE if isinstance(c, dl.AtLeast) else LE
            entry = (kind, (c.n, c.role.name, self.intern(c.inner)))
        else:
            raise TypeError(f"not an NNF concept: {c!r}")
        i = len(self.concepts)
        self.ids[c] = i
        self.concepts.append(c)
        self.kind.append(entry[0])
        self.args.append(entry[1])
        return i

    def neg(self, i: int) -> int:
        if i not in self._neg:
            self._neg[i] = self.intern(dl.nnf_not(self.concepts[i]))
        return self._neg[i]


Deps = frozenset  # branch points a fact depends on
NONE: Deps = frozenset()


@dataclass
class _Node:
    label: dict  # concept id -> Deps
    names: dict  # object name -> Deps
    parent: Optional[int]
    edges: dict = field(default_factory=dict)  # role -> {target id -> Deps}

    def clone(self) -> "_Node":
        return _Node(
            dict(self.label), dict(self.names), self.parent, {r: dict(t) for r, t in self.edges.items()}
        )


class _State:
    def __init__(self) -> None:
        self.nodes: dict[int, _Node] = {}
        self.node_of: dict[str, int] = {}
        self.neq: dict[frozenset, Deps] = {}
        self.next_id = 0

    def clone(self) -> "_State":
        s = _State()
        s.nodes = {i: n.clone() for i, n in self.nodes.items()}
        s.node_of = dict(self.node_of)
        s.neq = dict(self.neq)
        s.next_id = self.next_id
        return s

    def add_node(self, label: dict, names: dict, parent: Optional[int]) -> int:
        i = self.next_id
        self.next_id += 1
        self.nodes[i] = _Node(label, names, parent)
        for o in names:
            self.node_of[o] = i
        return i

    def successors(self, x: int, role: str) -> list[int]:
        return sorted(self.nodes[x].edges.get(role, ()))

    def distinct(self, a: int, b: int) -> bool:
        return frozenset((a, b)) in self.neq


@dataclass
class TableauStats:
    rule_applications: int = 0
    branches: int = 0
    backjumps: int = 0
    nodes_created: int = 0
    fallback_used: bool = False


@dataclass(frozen=True)
class SatResult:
    status: str
    model: Optional[dl.Interpretation] = None
    stats: TableauStats = field(default_factory=TableauStats)

    @property
    def satisfiable(self) -> bool:
        return self.status == "satisfiable"


class _Clash(Exception):
    """The current branch has a clash caused by the given branch points."""

    def __init__(self, deps: Deps) -> None:
        super().__init__()
        self.deps = deps


def _union(*sets: Deps) -> Deps:
    return frozenset().union(*sets)


class _Tableau:
    """Depth-first completion with dependency-directed backjumping: every
    label entry, edge, name and inequality records the branch points it
    depends on, and a clash skips every branch point it does not depend on."""

    def __init__(self, kb: dl.KnowledgeBase, goal: dl.Concept, unique_names: bool, max_rules: int) -> None:
        self.kb = kb
        self.goal = goal
        self.unique_names = unique_names
        self.max_rules = max_rules
        self.table = _Table()
        self.stats = TableauStats()
        self.gcis: list[int] = [self.table.intern(dl.TOP)]
        for c in self._internalised(kb):
            i = self.table.intern(c)
            if i not in self.gcis:
                self.gcis.append(i)
        self.goal_id = self.table.intern(dl.nnf(goal))
        self.touched: set[int] = set()
        self.next_branch = 0

    @staticmethod
    def _internalised(kb: dl.KnowledgeBase) -> list[dl.Concept]:
        """One universal concept per inclusion. A definition ``A ≡ C`` (two
        inclusions sharing an origin) becomes ``(A ⊓ C) ⊔ (¬A ⊓ ¬C)``, so
        the tableau branches on the name before exploring ``C``."""
        out: list[dl.Concept] = []
        by_origin: dict[int, list[dl.Subsumption]] = {}
        for ax in kb.axioms:
            if isinstance(ax, dl.Subsumption) and ax.origin is not None:
                by_origin.setdefault(ax.origin, []).append(ax)
            elif isinstance(ax, dl.RoleAssertion) and not isinstance(ax.role, dl.RoleName):
                raise FragmentError(f"role {ax.role} is outside ALCOQ")
        done: set[int] = set()
        for ax in kb.axioms:
            if not isinstance(ax, dl.Subsumption):
                continue
            pair = by_origin.get(ax.origin, []) if ax.origin is not None else []
            if len(pair) == 2 and pair[0].sub == pair[1].sup and pair[0].sup == pair[1].sub:
                if ax.origin in done:
                    continue
                done.add(ax.origin)
                name, body = pair[0].sup, pair[0].sub
                if not isinstance(name, dl.Atomic):
                    name, body = body, name
                if isinstance(name, dl.Atomic):
                    out.append(dl.Or(dl.And(name, dl.nnf(body)), dl.And(dl.Not(name), dl.nnf_not(body))))
                    continue
            if isinstance(dl.nnf(ax.sub), dl.Bottom):
                continue
            out.append(dl.nnf(dl.Or(dl.Not(ax.sub), ax.sup)))
        return out

    # -- setup

    def fresh_label(self, deps: Deps) -> dict:
        return {c: deps for c in self.gcis}

    def initial(self) -> _State:
        st = _State()
        sig = self.kb.signature.merge(dl.signature_of((), [self.goal]))
        for o in sig.objects:
            label = self.fresh_label(NONE)
            label[self.table.intern(dl.Nominal((o,)))] = NONE
            st.add_node(label, {o: NONE}, None)
        if self.unique_names:
            ids = [st.node_of[o] for o in sig.objects]
            for a, b in itertools.combinations(ids, 2):
                st.neq[frozenset((a, b))] = NONE
        label = self.fresh_label(NONE)
        label[self.goal_id] = NONE
        self.root = st.add_node(label, {}, None)
        for ax in self.kb.axioms:
            if isinstance(ax, dl.ConceptAssertion):
                st.nodes[st.node_of[ax.obj]].label.setdefault(self.table.intern(dl.nnf(ax.concept)), NONE)
            elif isinstance(ax, dl.RoleAssertion):
                a, b = st.node_of[ax.subject], st.node_of[ax.obj]
                st.nodes[a].edges.setdefault(ax.role.name, {})[b] = NONE
        self.touched = set(st.nodes)
        return st

    # -- blocking

    def blocking(self, st: _State) -> tuple[dict[int, int], set[int]]:
        """(directly blocked node -> blocker, indirectly blocked nodes)."""
        direct: dict[int, int] = {}
        indirect: set[int] = set()
        for x in sorted(st.nodes):
            node = st.nodes[x]
            if node.names:
                continue
            p = node.parent
            if p is not None and (p in direct or p in indirect):
                indirect.add(x)
                continue
            label = node.label.keys()
            while p is not None and not st.nodes[p].names:
                if st.nodes[p].label.keys() == label:
                    direct[x] = p
                    break
                p = st.nodes[p].parent
        return direct, indirect

    # -- merging

    def merge(self, st: _State, x: int, y: int, deps: Deps) -> None:
        """Merge node x into node y."""
        if x == y:
            return
        pair = frozenset((x, y))
        if pair in st.neq:
            raise _Clash(deps | st.neq[pair])
        nx, ny = st.nodes[x], st.nodes[y]
        if nx.names and ny.names and self.unique_names:
            raise _Clash(_union(deps, *nx.names.values(), *ny.names.values()))
        self.touched.add(y)
        for c, d in nx.label.items():
            if c not in ny.label:
                ny.label[c] = d | deps
        for o, d in nx.names.items():
            ny.names.setdefault(o, d | deps)
            st.node_of[o] = y
        for nz in st.nodes.values():
            for targets in nz.edges.values():
                if x in targets:
                    d = targets.pop(x)
                    targets.setdefault(y, d | deps)
        for role, targets in nx.edges.items():
            for w, d in targets.items():
                if w in st.nodes and st.nodes[w].names:
                    ny.edges.setdefault(role, {}).setdefault(y if w == x else w, d | deps)
        for p in [p for p in st.neq if x in p]:
            (other,) = p - {x}
            d = st.neq.pop(p)
            st.neq.setdefault(frozenset((y, other)), d | deps)
        self.prune(st, x, keep=y)

    def prune(self, st: _State, x: int, keep: Optional[int] = None) -> None:
        children = [i for i, n in st.nodes.items() if n.parent == x and not n.names and i != keep]
        del st.nodes[x]
        self.touched.discard(x)
        for z in st.nodes.values():
            for targets in z.edges.values():
                targets.pop(x, None)
        for p in [p for p in st.neq if x in p]:
            del st.neq[p]
        for c in children:
            if c in st.nodes:
                self.prune(st, c)

    # -- rules

    def has_distinct(self, st: _State, cands: list[int], n: int) -> bool:
        if len(cands) < n:
            return False
        if n <= 1:
            return True
        for combo in itertools.combinations(cands, n):
            if all(st.distinct(a, b) for a, b in itertools.combinations(combo, 2)):
                return True
        return False

    def check_clash(self, st: _State) -> None:
        t = self.table
        for x in sorted(self.touched):
            node = st.nodes[x]
            atoms: dict[str, Deps] = {}
            negs: dict[str, Deps] = {}
            for c, d in node.label.items():
                k = t.kind[c]
                if k == BOT:
                    raise _Clash(d)
                if k == ATOM:
                    atoms[t.args[c][0]] = d
                elif k == NATOM:
                    negs[t.args[c][0]] = d
                elif k == NNOM:
                    for o in t.args[c]:
                        if o in node.names:
                            raise _Clash(d | node.names[o])
            for a in sorted(atoms.keys() & negs.keys()):
                raise _Clash(atoms[a] | negs[a])
        self.touched = set()

    def branch_id(self) -> int:
        self.next_branch += 1
        self.stats.branches += 1
        return self.next_branch

    def le_reasons(self, st: _State, x: int, c: int, cands: list[int]) -> Deps:
        """Why the candidates of an at-most restriction must be merged."""
        _, role, q = self.table.args[c]
        node = st.nodes[x]
        parts = [node.label[c]]
        for y in cands:
            parts.append(node.edges[role][y])
            parts.append(st.nodes[y].label[q])
        for a, b in itertools.combinations(cands, 2):
            parts.append(st.neq.get(frozenset((a, b)), NONE))
        return _union(*parts)

    def next_rule(self, st: _State):
        """The first applicable rule as (kind, payload), or None if complete."""
        t = self.table
        direct, indirect = self.blocking(st)
        order = [x for x in sorted(st.nodes) if x not in indirect]
        # nominal rule
        for x in order:
            node = st.nodes[x]
            for c in sorted(node.label):
                if t.kind[c] != NOM:
                    continue
                names = t.args[c]
                if any(o in node.names for o in names):
                    continue
                d = node.label[c]
                if len(names) == 1:
                    return "merge", [(x, st.node_of[names[0]], d)]
                singles = [t.intern(dl.Nominal((o,))) for o in names]
                if not any(c1 in node.label for c1 in singles):
                    return "branch-add", ([[(x, c1)] for c1 in singles], d)
        for x in order:
            label = st.nodes[x].label
            for c in sorted(label):
                if t.kind[c] == AND:
                    left, right = t.args[c]
                    if left not in label or right not in label:
                        d = label[c]
                        return "add", [(x, left, d), (x, right, d)]
        for x in order:
            label = st.nodes[x].label
            for c in sorted(label):
                if t.kind[c] == OR:
                    left, right = t.args[c]
                    if left not in label and right not in label:
                        return "branch-add", ([[(x, left)], [(x, right), (x, t.neg(left))]], label[c])
        for x in order:
            node = st.nodes[x]
            for c in sorted(node.label):
                if t.kind[c] != LE:
                    continue
                _, role, q = t.args[c]
                nq = t.neg(q)
                for y in st.successors(x, role):
                    ly = st.nodes[y].label
                    if q not in ly and nq not in ly:
                        d = node.label[c] | node.edges[role][y]
                        return "branch-add", ([[(y, q)], [(y, nq)]], d)
        for x in order:
            node = st.nodes[x]
            for c in sorted(node.label):
                if t.kind[c] != LE:
                    continue
                n, role, q = t.args[c]
                cands = [y for y in st.successors(x, role) if q in st.nodes[y].label]
                if len(cands) <= n:
                    continue
                d = self.le_reasons(st, x, c, cands)
                pairs = []
                for a, b in itertools.combinations(cands, 2):
                    if st.distinct(a, b):
                        continue
                    na, nb = st.nodes[a].names, st.nodes[b].names
                    if nb and not na:
                        pairs.append((a, b))
                    elif na and not nb:
                        pairs.append((b, a))
                    else:
                        pairs.append((max(a, b), min(a, b)))
                return "branch-merge", (pairs, d)
        for x in order:
            if x in direct:
                continue
            node = st.nodes[x]
            for c in sorted(node.label):
                if t.kind[c] != GE:
                    continue
                n, role, q = t.args[c]
                cands = [y for y in st.successors(x, role) if q in st.nodes[y].label]
                if not self.has_distinct(st, cands, n):
                    return "generate", (x, n, role, q, node.label[c])
        return None

    def apply(self, st: _State, kind: str, payload) -> None:
        self.stats.rule_applications += 1
        if self.stats.rule_applications > self.max_rules:
            raise TableauBudgetExceeded(f"more than {self.max_rules} rule applications")
        if kind == "add":
            for x, c, d in payload:
                st.nodes[x].label.setdefault(c, d)
                self.touched.add(x)
        elif kind == "merge":
            for x, y, d in payload:
                self.merge(st, x, y, d)
        elif kind == "generate":
            x, n, role, q, d = payload
            new = []
            for _ in range(n):
                label = self.fresh_label(d)
                label[q] = d
                y = st.add_node(label, {}, x)
                self.stats.nodes_created += 1
                st.nodes[x].edges.setdefault(role, {})[y] = d
                self.touched.add(y)
                new.append(y)
            for a, b in itertools.combinations(new, 2):
                st.neq[frozenset((a, b))] = d
        else:
            raise AssertionError(kind)

    def alternatives(self, kind: str, payload, b: int) -> list[tuple]:
        if kind == "branch-add":
            alts, d = payload
            d = d | {b}
            return [("add", [(x, c, d) for x, c in alt]) for alt in alts]
        pairs, d = payload
        d = d | {b}
        return [("merge", [(x, y, d)]) for x, y in pairs]

    def run(self) -> Optional[_State]:
        """Depth-first search over branches; the first complete clash-free
        completion graph is returned."""
        # pending alternatives: (branch id, state, action, is last alternative)
        pending: list[tuple[int, _State, tuple, bool]] = []
        failed: dict[int, Deps] = {}  # reasons earlier alternatives of a branch failed
        exhausted: dict[int, Deps] = {}
        st = self.initial()
        action: Optional[tuple] = None
        while True:
            try:
                if action is not None:
                    self.apply(st, *action)
                while True:
                    self.check_clash(st)
                    rule = self.next_rule(st)
                    if rule is None:
                        return st
                    kind, payload = rule
                    if kind not in ("branch-add", "branch-merge"):
                        self.apply(st, kind, payload)
                        continue
                    if kind == "branch-merge" and not payload[0]:
                        raise _Clash(payload[1])
                    b = self.branch_id()
                    alts = self.alternatives(kind, payload, b)
                    failed[b] = NONE
                    if len(alts) == 1:
                        exhausted[b] = NONE
                    for i in range(len(alts) - 1, 0, -1):
                        pending.append((b, st.clone(), alts[i], i == len(alts) - 1))
                    self.apply(st, *alts[0])
            except _Clash as clash:
                deps = set(clash.deps)
                while True:
                    done = [b for b in deps if b in exhausted]
                    if not done:
                        break
                    b = max(done)
                    deps.discard(b)
                    deps |= exhausted[b]
                while pending and pending[-1][0] not in deps:
                    pending.pop()
                    self.stats.backjumps += 1
                if not pending:
                    return None
                b, st, action, last = pending.pop()
                failed[b] = failed[b] | (frozenset(deps) - {b})
                if last:
                    exhausted[b] = failed[b]
                self.touched = set(st.nodes)

    # -- model extraction

    def extract(self, st: _State) -> dl.Interpretation:
        direct, indirect = self.blocking(st)
        universe = [x for x in sorted(st.nodes) if x not in indirect]
        t = self.table
        sig = self.kb.signature.merge(dl.signature_of((), [self.goal]))
        concepts = {a: set() for a in sig.concepts}
        for x in universe:
            for c in st.nodes[x].label:
                if t.kind[c] == ATOM:
                    concepts.setdefault(t.args[c][0], set()).add(x)
        roles = {p: set() for p in sig.properties}
        for x in universe:
            source = st.nodes[direct.get(x, x)]
            for role, targets in source.edges.items():
                for y in targets:
                    roles.setdefault(role, set()).add((x, y))
        objects = {o: i for o, i in st.node_of.items()}
        return dl.Interpretation(tuple(universe), objects, concepts, roles)


def tableau_sat(
    kb: dl.KnowledgeBase,
    goal: dl.Concept,
    *,
    unique_names: bool = False,
    max_rules: int = 200_000,
) -> SatResult:
    """Decide whether ``goal`` has an instance in some model of ``kb``.

    With ``unique_names`` distinct object names denote distinct elements.
    """
    if dl.dl_fragment(kb) != dl.ALCOQ:
        raise FragmentError("tableau_sat needs an ALCOQ knowledge base")
    if any(not isinstance(r, dl.RoleName) for r in dl.concept_roles(goal)):
        raise FragmentError("goal concept is outside ALCOQ")
    tab = _Tableau(kb, goal, unique_names, max_rules)
    st = tab.run()
    if st is None:
        return SatResult("unsatisfiable", None, tab.stats)
    model = tab.extract(st)
    objects = tuple(model.objects)
    if (
        not dl.check_model(model, kb)
        or not dl.interpret_concept(model, goal)
        or (unique_names and not dl.unique_names(model, objects))
    ):
        tab.stats.fallback_used = True
        size = len(model.universe)
        model = bounded_model_search(
            kb, goal, 2 * size + 2, unique_names=objects if unique_names else ()
        )
        if model is None:
            raise RuntimeError("tableau found a completion graph but no finite model could be built")
    return SatResult("satisfiable", model, tab.stats)
