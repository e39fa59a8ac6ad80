"""S-expression concrete syntax for shape sets.

::

    (shape NAME (target TARGET) (constraint EXPR))

    TARGET ::= none | (nodes v…) | (class v) | (subjects-of p) | (objects-of p)
    EXPR   ::= top | (node v) | (ref NAME) | (and E E…) | (or E E…) | (not E)
             | (>= n PATH E) | (<= n PATH E) | (= n PATH E)
             | (exists PATH E) | (forall PATH E)
    PATH   ::= p | (inv PATH) | (seq PATH PATH…)

``;`` starts a comment. A double-quoted token is a literal node and keeps its
quotes as part of the node name.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from .model import (
    And,
    AtLeast,
    AtMost,
    ClassTarget,
    Constraint,
    Exactly,
    Exists,
    Forall,
    Inverse,
    NO_TARGET,
    NodeConst,
    Nodes,
    NoTarget,
    Not,
    ObjectsOf,
    Or,
    PathExpr,
    Prop,
    Seq,
    Shape,
    ShapeRef,
    ShapeSet,
    ShapeSetError,
    SubjectsOf,
    TargetQuery,
    Top,
    TOP,
    desugar,
)


class ShapeSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Span:
    line: int
    column: int
    end_line: int
    end_column: int


@dataclass(frozen=True)
class ShapeDocument:
    shapes: ShapeSet
    spans: dict[str, Span]


# -- reader -------------------------------------------------------------------


@dataclass(frozen=True)
class _Atom:
    text: str
    line: int
    column: int

    @property
    def quoted(self) -> bool:
        return self.text.startswith('"')


@dataclass(frozen=True)
class _List:
    items: tuple["_Sexp", ...]
    span: Span

    @property
    def line(self) -> int:
        return self.span.line

    @property
    def column(self) -> int:
        return self.span.column


_Sexp = Union[_Atom, _List]


def _tokens(text: str) -> Iterator[tuple[str, int, int]]:
    line, col, i = 1, 1, 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line, col, i = line + 1, 1, i + 1
            continue
        if ch.isspace():
            col, i = col + 1, i + 1
            continue
        if ch == ";":
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        if ch in "()":
            yield ch, line, col
            col, i = col + 1, i + 1
            continue
        start, start_col = i, col
        if ch == '"':
            i += 1
            while i < len(text) and text[i] != '"':
                if text[i] == "\n":
                    raise ShapeSyntaxError("unterminated string", line, start_col)
                i += 2 if text[i] == "\\" else 1
            if i >= len(text):
                raise ShapeSyntaxError("unterminated string", line, start_col)
            i += 1
        else:
            while i < len(text) and not text[i].isspace() and text[i] not in '();"':
                i += 1
        yield text[start:i], line, start_col
        col += i - start


def _read(text: str) -> list[_Sexp]:
    stack: list[tuple[list, int, int]] = []
    top: list[_Sexp] = []
    for tok, line, col in _tokens(text):
        if tok == "(":
            stack.append(([], line, col))
        elif tok == ")":
            if not stack:
                raise ShapeSyntaxError("unbalanced ')'", line, col)
            items, l0, c0 = stack.pop()
            node = _List(tuple(items), Span(l0, c0, line, col + 1))
            (stack[-1][0] if stack else top).append(node)
        else:
            (stack[-1][0] if stack else top).append(_Atom(tok, line, col))
    if stack:
        _, line, col = stack[-1]
        raise ShapeSyntaxError("unclosed '('", line, col)
    return top


# -- forms --------------------------------------------------------------------


def _head(form: _Sexp, what: str) -> tuple[str, tuple[_Sexp, ...]]:
    if not isinstance(form, _List) or not form.items:
        raise ShapeSyntaxError(f"expected a {what} form", form.line, form.column)
    head = form.items[0]
    if not isinstance(head, _Atom) or head.quoted:
        raise ShapeSyntaxError(f"expected an operator in {what} form", head.line, head.column)
    return head.text, form.items[1:]


def _arity(form: _List, op: str, args, n: int, at_least: bool = False) -> None:
    if len(args) < n or (not at_least and len(args) != n):
        want = f"at least {n}" if at_least else str(n)
        raise ShapeSyntaxError(f"'{op}' takes {want} argument(s), got {len(args)}", form.line, form.column)


def _name(x: _Sexp, what: str, *, literal_ok: bool = False) -> str:
    if not isinstance(x, _Atom) or (x.quoted and not literal_ok):
        raise ShapeSyntaxError(f"expected a {what}", x.line, x.column)
    return x.text


def _count(x: _Sexp) -> int:
    if not isinstance(x, _Atom) or not x.text.isdigit():
        raise ShapeSyntaxError("expected a non-negative integer", x.line, x.column)
    return int(x.text)


class _Parser:
    def __init__(self) -> None:
        self.refs: list[tuple[str, int, int]] = []

    def path(self, x: _Sexp) -> PathExpr:
        if isinstance(x, _Atom):
            return Prop(_name(x, "property name"))
        op, args = _head(x, "path")
        if op == "inv":
            _arity(x, op, args, 1)
            return Inverse(self.path(args[0]))
        if op == "seq":
            _arity(x, op, args, 2, at_least=True)
            parts = [self.path(a) for a in args]
            out = parts[-1]
            for p in reversed(parts[:-1]):
                out = Seq(p, out)
            return out
        raise ShapeSyntaxError(f"unknown path operator '{op}'", x.line, x.column)

    def expr(self, x: _Sexp):
        if isinstance(x, _Atom):
            if x.text == "top":
                return TOP
            raise ShapeSyntaxError(f"unknown constraint '{x.text}'", x.line, x.column)
        op, args = _head(x, "constraint")
        if op == "node":
            _arity(x, op, args, 1)
            return NodeConst(_name(args[0], "node", literal_ok=True))
        if op == "ref":
            _arity(x, op, args, 1)
            name = _name(args[0], "shape name")
            self.refs.append((name, args[0].line, args[0].column))
            return ShapeRef(name)
        if op in ("and", "or"):
            _arity(x, op, args, 2, at_least=True)
            parts = [self.expr(a) for a in args]
            out = parts[0]
            for p in parts[1:]:
                out = And(out, p) if op == "and" else Or(out, p)
            return out
        if op == "not":
            _arity(x, op, args, 1)
            return Not(self.expr(args[0]))
        if op in (">=", "<=", "="):
            _arity(x, op, args, 3)
            n = _count(args[0])
            cls = {">=": AtLeast, "<=": AtMost, "=": Exactly}[op]
            try:
                return cls(n, self.path(args[1]), self.expr(args[2]))
            except ShapeSyntaxError:
                raise
            except ValueError as exc:
                raise ShapeSyntaxError(str(exc), args[0].line, args[0].column) from None
        if op in ("exists", "forall"):
            _arity(x, op, args, 2)
            cls = Exists if op == "exists" else Forall
            return cls(self.path(args[0]), self.expr(args[1]))
        raise ShapeSyntaxError(f"unknown operator '{op}'", x.line, x.column)

    def target(self, x: _Sexp) -> TargetQuery:
        if isinstance(x, _Atom):
            if x.text == "none":
                return NO_TARGET
            raise ShapeSyntaxError(f"unknown target '{x.text}'", x.line, x.column)
        op, args = _head(x, "target")
        if op == "nodes":
            _arity(x, op, args, 1, at_least=True)
            return Nodes(tuple(_name(a, "node", literal_ok=True) for a in args))
        if op == "class":
            _arity(x, op, args, 1)
            return ClassTarget(_name(args[0], "class name"))
        if op in ("subjects-of", "objects-of"):
            _arity(x, op, args, 1)
            prop = _name(args[0], "property name")
            return SubjectsOf(prop) if op == "subjects-of" else ObjectsOf(prop)
        raise ShapeSyntaxError(f"unknown target operator '{op}'", x.line, x.column)

    def shape(self, form: _Sexp) -> tuple[Shape, _Atom]:
        op, args = _head(form, "shape")
        if op != "shape":
            raise ShapeSyntaxError(f"expected 'shape', got '{op}'", form.line, form.column)
        _arity(form, op, args, 3)
        name_atom = args[0]
        name = _name(name_atom, "shape name")
        clauses: dict[str, _Sexp] = {}
        for clause in args[1:]:
            key, body = _head(clause, "shape clause")
            if key not in ("target", "constraint"):
                raise ShapeSyntaxError(f"unknown shape clause '{key}'", clause.line, clause.column)
            if key in clauses:
                raise ShapeSyntaxError(f"repeated '{key}' clause", clause.line, clause.column)
            _arity(clause, key, body, 1)
            clauses[key] = body[0]
        if len(clauses) != 2:
            raise ShapeSyntaxError("a shape needs a target and a constraint clause", form.line, form.column)
        return Shape(name, self.expr(clauses["constraint"]), self.target(clauses["target"])), name_atom


def parse_shapes(text: str) -> ShapeDocument:
    """Parse a shapes document; every error carries a line and column."""
    parser = _Parser()
    shapes: list[Shape] = []
    spans: dict[str, Span] = {}
    for form in _read(text):
        shape, name_atom = parser.shape(form)
        if shape.name in spans:
            raise ShapeSyntaxError(f"duplicate shape name '{shape.name}'", name_atom.line, name_atom.column)
        spans[shape.name] = form.span
        shapes.append(shape)
    for name, line, col in parser.refs:
        if name not in spans:
            raise ShapeSyntaxError(f"unresolved shape reference '{name}'", line, col)
    try:
        result = ShapeSet(shapes)
    except ShapeSetError as exc:  # pragma: no cover - the checks above come first
        raise ShapeSyntaxError(str(exc), 1, 1) from None
    return ShapeDocument(result, spans)


def parse_constraint(text: str) -> Constraint:
    """A single constraint expression, desugared. Shape references are not
    resolved here; the caller checks them against its shape set."""
    forms = _read(text)
    if len(forms) != 1:
        raise ShapeSyntaxError(f"expected one constraint expression, got {len(forms)}", 1, 1)
    return desugar(_Parser().expr(forms[0]))


# -- writer -------------------------------------------------------------------


def _token(name: str) -> str:
    if not name or any(ch.isspace() or ch in '();' for ch in name) and not name.startswith('"'):
        raise ValueError(f"name {name!r} cannot be written as a token")
    if '"' in name and not (len(name) >= 2 and name.startswith('"') and name.endswith('"')):
        raise ValueError(f"name {name!r} cannot be written as a token")
    return name


def format_path(path: PathExpr) -> str:
    if isinstance(path, Prop):
        return _token(path.name)
    if isinstance(path, Inverse):
        return f"(inv {format_path(path.path)})"
    parts = [path.first]
    rest = path.second
    while isinstance(rest, Seq):
        parts.append(rest.first)
        rest = rest.second
    parts.append(rest)
    return "(seq " + " ".join(format_path(p) for p in parts) + ")"


def _or_parts(phi: Constraint):
    """``(x, y)`` if ``phi`` is ``¬(¬x ∧ ¬y)``."""
    if isinstance(phi, Not) and isinstance(phi.inner, And):
        left, right = phi.inner.left, phi.inner.right
        if isinstance(left, Not) and isinstance(right, Not):
            return left.inner, right.inner
    return None


def _exactly_parts(phi: Constraint):
    """``(n, path, inner)`` if ``phi`` is ``¬≥(n+1) ρ.ψ ∧ ≥n ρ.ψ``."""
    if isinstance(phi, And) and isinstance(phi.left, Not) and isinstance(phi.right, AtLeast):
        upper, lower = phi.left.inner, phi.right
        if (
            isinstance(upper, AtLeast)
            and upper.n == lower.n + 1
            and upper.path == lower.path
            and upper.inner == lower.inner
        ):
            return lower.n, lower.path, lower.inner
    return None


def format_constraint(phi: Constraint) -> str:
    """Readable form of a core constraint, using the derived operators where
    the shape matches; parsing the result gives back the same constraint."""
    if isinstance(phi, Top):
        return "top"
    if isinstance(phi, ShapeRef):
        return f"(ref {_token(phi.name)})"
    if isinstance(phi, NodeConst):
        return f"(node {_token(phi.node)})"
    ors = _or_parts(phi)
    if ors is not None:
        parts = [ors[1]]
        left = ors[0]
        while _or_parts(left) is not None:
            left, right = _or_parts(left)
            parts.append(right)
        parts.append(left)
        return "(or " + " ".join(format_constraint(p) for p in reversed(parts)) + ")"
    exact = _exactly_parts(phi)
    if exact is not None:
        n, path, inner = exact
        return f"(= {n} {format_path(path)} {format_constraint(inner)})"
    if isinstance(phi, Not) and isinstance(phi.inner, AtLeast):
        inner = phi.inner
        if inner.n == 1 and isinstance(inner.inner, Not):
            return f"(forall {format_path(inner.path)} {format_constraint(inner.inner.inner)})"
        return f"(<= {inner.n - 1} {format_path(inner.path)} {format_constraint(inner.inner)})"
    if isinstance(phi, Not):
        return f"(not {format_constraint(phi.inner)})"
    if isinstance(phi, AtLeast):
        return f"(>= {phi.n} {format_path(phi.path)} {format_constraint(phi.inner)})"
    if isinstance(phi, And):
        parts = [phi.right]
        left = phi.left
        while isinstance(left, And) and _exactly_parts(left) is None:
            parts.append(left.right)
            left = left.left
        parts.append(left)
        return "(and " + " ".join(format_constraint(p) for p in reversed(parts)) + ")"
    raise TypeError(f"not a core constraint: {phi!r}")


def format_target(q: TargetQuery) -> str:
    if isinstance(q, NoTarget):
        return "none"
    if isinstance(q, Nodes):
        return "(nodes " + " ".join(_token(v) for v in q.nodes) + ")"
    if isinstance(q, ClassTarget):
        return f"(class {_token(q.cls)})"
    if isinstance(q, SubjectsOf):
        return f"(subjects-of {_token(q.prop)})"
    if isinstance(q, ObjectsOf):
        return f"(objects-of {_token(q.prop)})"
    raise TypeError(f"not a target: {q!r}")


def format_shape(shape: Shape) -> str:
    return (
        f"(shape {_token(shape.name)}\n"
        f"  (target {format_target(shape.target)})\n"
        f"  (constraint {format_constraint(shape.constraint)}))"
    )


def format_shapes(shapes: ShapeSet) -> str:
    return "".join(format_shape(s) + "\n" for s in shapes)
