"""Knowledge-base serialisation.

Native format: three signature lines, then one axiom per line::

    concepts: Painting PaintingShape
    properties: creator
    objects: cubism

    Painting ⊑ PaintingShape
    ≥1 exhibitedAt.⊤ ⊓ ∀creator.PainterShape ≡ PaintingShape
    cubism : PaintingShape
    (guernica, cubism) : style

Concepts print in core form with readable sugar where the structure matches
(``⊥``, ``⊔``, ``∀``, ``≤n``, ``=n``); the parser undoes exactly that sugar,
so ``format(parse(text)) == text`` for any formatted text. Two consecutive
subsumptions ``C ⊑ D`` and ``D ⊑ C`` sharing an origin print as ``C ≡ D``;
the parser numbers equivalences 0, 1, … in order. Names outside
``[A-Za-z_][A-Za-z0-9_-]*`` are written in backquotes.

The dl-exchange format is OWL 2 functional-style syntax. Compositions are
unfolded exactly where possible; counting over a composition is refused.
"""

from __future__ import annotations

import re
from typing import Iterator, Optional
from urllib.parse import quote

from . import dl

NATIVE = "native"
DL_EXCHANGE = "dl-exchange"
FORMATS = (NATIVE, DL_EXCHANGE)


class KbSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class InexpressibleError(ValueError):
    """The knowledge base cannot be exported without changing its meaning."""


_BARE = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*\Z")


def _name(n: str) -> str:
    if _BARE.match(n):
        return n
    return "`" + n.replace("\\", "\\\\").replace("`", "\\`") + "`"


# -- native writer ------------------------------------------------------------


def core(c: dl.Concept) -> dl.Concept:
    """Replace the negation-normal-form variants by their core equivalents."""
    if isinstance(c, (dl.Atomic, dl.Nominal, dl.Top)):
        return c
    if isinstance(c, dl.Bottom):
        return dl.bottom()
    if isinstance(c, dl.Not):
        return dl.Not(core(c.inner))
    if isinstance(c, dl.And):
        return dl.And(core(c.left), core(c.right))
    if isinstance(c, dl.Or):
        return dl.union(core(c.left), core(c.right))
    if isinstance(c, dl.AtLeast):
        return dl.AtLeast(c.n, c.role, core(c.inner))
    if isinstance(c, dl.AtMost):
        return dl.at_most(c.n, c.role, core(c.inner))
    raise TypeError(f"not a concept: {c!r}")


def format_role(r: dl.Role) -> str:
    if isinstance(r, dl.RoleName):
        return _name(r.name)
    if isinstance(r, dl.InverseRole):
        inner = format_role(r.role)
        return (inner if isinstance(r.role, (dl.RoleName, dl.InverseRole)) else f"({inner})") + "⁻"
    first = format_role(r.first)
    if isinstance(r.first, dl.Compose):
        first = f"({first})"
    return f"{first}∘{format_role(r.second)}"


def _union_parts(c: dl.Concept):
    if isinstance(c, dl.Not) and isinstance(c.inner, dl.And):
        left, right = c.inner.left, c.inner.right
        if isinstance(left, dl.Not) and isinstance(right, dl.Not):
            return left.inner, right.inner
    return None


def _exactly_parts(c: dl.Concept):
    if isinstance(c, dl.And) and isinstance(c.left, dl.Not) and isinstance(c.right, dl.AtLeast):
        upper, lower = c.left.inner, c.right
        if (
            isinstance(upper, dl.AtLeast)
            and upper.n == lower.n + 1
            and upper.role == lower.role
            and upper.inner == lower.inner
        ):
            return lower.n, lower.role, lower.inner
    return None


# precedence: 0 union, 1 intersection, 2 unary
def _fmt(c: dl.Concept, ctx: int) -> str:
    text, prec = _fmt_prec(c)
    return f"({text})" if prec < ctx else text


def _fmt_prec(c: dl.Concept) -> tuple[str, int]:
    if isinstance(c, dl.Top):
        return "⊤", 2
    if isinstance(c, dl.Atomic):
        return _name(c.name), 2
    if isinstance(c, dl.Nominal):
        return "{" + ", ".join(_name(o) for o in c.names) + "}", 2
    if c == dl.bottom():
        return "⊥", 2
    parts = _union_parts(c)
    if parts is not None:
        return f"{_fmt(parts[0], 0)} ⊔ {_fmt(parts[1], 1)}", 0
    exact = _exactly_parts(c)
    if exact is not None:
        n, role, inner = exact
        return f"={n} {format_role(role)}.{_fmt(inner, 2)}", 2
    if isinstance(c, dl.Not) and isinstance(c.inner, dl.AtLeast):
        r = c.inner
        if r.n == 1 and isinstance(r.inner, dl.Not):
            return f"∀{format_role(r.role)}.{_fmt(r.inner.inner, 2)}", 2
        return f"≤{r.n - 1} {format_role(r.role)}.{_fmt(r.inner, 2)}", 2
    if isinstance(c, dl.Not):
        return f"¬{_fmt(c.inner, 2)}", 2
    if isinstance(c, dl.AtLeast):
        return f"≥{c.n} {format_role(c.role)}.{_fmt(c.inner, 2)}", 2
    if isinstance(c, dl.And):
        return f"{_fmt(c.left, 1)} ⊓ {_fmt(c.right, 2)}", 1
    raise TypeError(f"not a core concept: {c!r}")


def format_concept(c: dl.Concept) -> str:
    return _fmt(core(c), 0)


def _axiom_lines(kb: dl.KnowledgeBase) -> Iterator[str]:
    axioms = list(kb.axioms)
    i = 0
    while i < len(axioms):
        ax = axioms[i]
        if isinstance(ax, dl.Subsumption):
            nxt = axioms[i + 1] if i + 1 < len(axioms) else None
            if (
                ax.origin is not None
                and isinstance(nxt, dl.Subsumption)
                and nxt.origin == ax.origin
                and core(nxt.sub) == core(ax.sup)
                and core(nxt.sup) == core(ax.sub)
            ):
                yield f"{format_concept(ax.sub)} ≡ {format_concept(ax.sup)}"
                i += 2
                continue
            yield f"{format_concept(ax.sub)} ⊑ {format_concept(ax.sup)}"
        elif isinstance(ax, dl.ConceptAssertion):
            yield f"{_name(ax.obj)} : {format_concept(ax.concept)}"
        elif isinstance(ax, dl.RoleAssertion):
            yield f"({_name(ax.subject)}, {_name(ax.obj)}) : {format_role(ax.role)}"
        else:
            raise TypeError(f"not an axiom: {ax!r}")
        i += 1


def format_native(kb: dl.KnowledgeBase) -> str:
    sig = kb.signature
    head = [
        "concepts:" + "".join(" " + _name(n) for n in sig.concepts),
        "properties:" + "".join(" " + _name(n) for n in sig.properties),
        "objects:" + "".join(" " + _name(n) for n in sig.objects),
    ]
    body = list(_axiom_lines(kb))
    text = "\n".join(head) + "\n"
    if body:
        text += "\n" + "\n".join(body) + "\n"
    return text


# -- native reader ------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_\-]*)|(?P<quoted>`(?:[^`\\]|\\.)*`)|(?P<num>\d+)"
    r"|(?P<sym>[⊑≡⊓⊔¬∀∃≥≤=⁻∘⊤⊥{}(),.:]))"
)


class _Reader:
    def __init__(self, text: str, line: int) -> None:
        self.tokens: list[tuple[str, str, int]] = []
        self.line = line
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
                raise KbSyntaxError(f"unexpected character {text[col - 1]!r}", line, col)
            kind = m.lastgroup
            value = m.group(kind)
            start = m.start(kind)
            if kind == "quoted":
                value = re.sub(r"\\(.)", r"\1", value[1:-1])
                kind = "name"
            self.tokens.append((kind, value, start + 1))
            pos = m.end()
        self.i = 0

    def peek(self, value: Optional[str] = None) -> bool:
        if self.i >= len(self.tokens):
            return False
        return value is None or self.tokens[self.i][1] == value and self.tokens[self.i][0] == "sym"

    def col(self) -> int:
        return self.tokens[self.i][2] if self.i < len(self.tokens) else (self.tokens[-1][2] + 1 if self.tokens else 1)

    def fail(self, msg: str):
        raise KbSyntaxError(msg, self.line, self.col())

    def take(self, kind: str, value: Optional[str] = None) -> str:
        if self.i >= len(self.tokens):
            self.fail(f"expected {value or kind}, found end of line")
        k, v, _ = self.tokens[self.i]
        if k != kind or (value is not None and v != value):
            self.fail(f"expected {value or kind}, found {v!r}")
        self.i += 1
        return v

    def done(self) -> bool:
        return self.i >= len(self.tokens)

    # roles
    def role(self) -> dl.Role:
        r = self.role_base()
        if self.peek("∘"):
            self.take("sym", "∘")
            return dl.Compose(r, self.role())
        return r

    def role_base(self) -> dl.Role:
        if self.peek("("):
            self.take("sym", "(")
            r = self.role()
            self.take("sym", ")")
        else:
            r = dl.RoleName(self.take("name"))
        while self.peek("⁻"):
            self.take("sym", "⁻")
            r = dl.InverseRole(r)
        return r

    # concepts
    def concept(self) -> dl.Concept:
        c = self.conj()
        while self.peek("⊔"):
            self.take("sym", "⊔")
            c = dl.union(c, self.conj())
        return c

    def conj(self) -> dl.Concept:
        c = self.unary()
        while self.peek("⊓"):
            self.take("sym", "⊓")
            c = dl.And(c, self.unary())
        return c

    def restriction(self):
        role = self.role()
        self.take("sym", ".")
        return role, self.unary()

    def unary(self) -> dl.Concept:
        if self.done():
            self.fail("expected a concept, found end of line")
        kind, value, _ = self.tokens[self.i]
        if kind == "name":
            self.i += 1
            return dl.Atomic(value)
        if kind != "sym":
            self.fail(f"unexpected {value!r}")
        if value == "⊤":
            self.i += 1
            return dl.TOP
        if value == "⊥":
            self.i += 1
            return dl.bottom()
        if value == "¬":
            self.i += 1
            return dl.Not(self.unary())
        if value == "(":
            self.i += 1
            c = self.concept()
            self.take("sym", ")")
            return c
        if value == "{":
            self.i += 1
            names = [self.take("name")]
            while self.peek(","):
                self.take("sym", ",")
                names.append(self.take("name"))
            self.take("sym", "}")
            return dl.Nominal(tuple(names))
        if value in ("∀", "∃"):
            self.i += 1
            role, inner = self.restriction()
            return dl.forall(role, inner) if value == "∀" else dl.exists(role, inner)
        if value in ("≥", "≤", "="):
            self.i += 1
            n = int(self.take("num"))
            role, inner = self.restriction()
            if value == "≥":
                if n < 1:
                    self.fail("≥ needs a positive count")
                return dl.AtLeast(n, role, inner)
            return dl.at_most(n, role, inner) if value == "≤" else dl.exactly(n, role, inner)
        self.fail(f"unexpected {value!r}")


def parse_native(text: str) -> dl.KnowledgeBase:
    lines = text.split("\n")
    header: dict[str, tuple[str, ...]] = {}
    axioms: list[dl.Axiom] = []
    origin = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        m = re.match(r"(concepts|properties|objects):(.*)\Z", line)
        if m and not axioms:
            key = m.group(1)
            if key in header:
                raise KbSyntaxError(f"repeated {key} line", lineno, 1)
            r = _Reader(m.group(2), lineno)
            names = []
            while not r.done():
                names.append(r.take("name"))
            header[key] = tuple(names)
            continue
        if len(header) != 3:
            raise KbSyntaxError("the signature lines must come first", lineno, 1)
        r = _Reader(line, lineno)
        if r.peek("("):
            save = r.i
            r.take("sym", "(")
            if r.peek() and r.tokens[r.i][0] == "name" and r.i + 1 < len(r.tokens) and r.tokens[r.i + 1][1] == ",":
                a = r.take("name")
                r.take("sym", ",")
                b = r.take("name")
                r.take("sym", ")")
                r.take("sym", ":")
                axioms.append(dl.RoleAssertion(a, b, r.role()))
                if not r.done():
                    r.fail("unexpected text after the axiom")
                continue
            r.i = save
        if r.peek() and r.tokens[r.i][0] == "name" and r.i + 1 < len(r.tokens) and r.tokens[r.i + 1][1] == ":":
            obj = r.take("name")
            r.take("sym", ":")
            axioms.append(dl.ConceptAssertion(obj, r.concept()))
        else:
            left = r.concept()
            if r.peek("⊑"):
                r.take("sym", "⊑")
                axioms.append(dl.Subsumption(left, r.concept()))
            elif r.peek("≡"):
                r.take("sym", "≡")
                axioms.extend(dl.equivalence(left, r.concept(), origin))
                origin += 1
            else:
                r.fail("expected ⊑ or ≡")
        if not r.done():
            r.fail("unexpected text after the axiom")
    if len(header) != 3:
        raise KbSyntaxError("missing signature lines", len(lines), 1)
    sig = dl.Signature(header["concepts"], header["properties"], header["objects"])
    try:
        return dl.KnowledgeBase(sig, tuple(axioms))
    except dl.SignatureError as exc:
        raise KbSyntaxError(str(exc), 1, 1) from None


# -- dl-exchange --------------------------------------------------------------

BASE = "http://example.org/shaclcheck"


def _iri(name: str) -> str:
    if _BARE.match(name):
        return ":" + name
    return f"<{BASE}#{quote(name, safe='')}>"


def _ofn_role(r: dl.Role) -> str:
    r = dl.normalize_role(r)
    if isinstance(r, dl.RoleName):
        return _iri(r.name)
    if isinstance(r, dl.InverseRole):
        return f"ObjectInverseOf({_iri(r.role.name)})"
    raise InexpressibleError("role composition left after unfolding")


def _ofn(c: dl.Concept) -> str:
    if isinstance(c, dl.Top):
        return "owl:Thing"
    if isinstance(c, dl.Bottom) or c == dl.bottom():
        return "owl:Nothing"
    if isinstance(c, dl.Atomic):
        return _iri(c.name)
    if isinstance(c, dl.Nominal):
        return "ObjectOneOf(" + " ".join(_iri(o) for o in c.names) + ")"
    if isinstance(c, dl.Not):
        return f"ObjectComplementOf({_ofn(c.inner)})"
    if isinstance(c, dl.And):
        return f"ObjectIntersectionOf({_ofn(c.left)} {_ofn(c.right)})"
    if isinstance(c, dl.Or):
        return f"ObjectUnionOf({_ofn(c.left)} {_ofn(c.right)})"
    if isinstance(c, dl.AtLeast):
        return f"ObjectMinCardinality({c.n} {_ofn_role(c.role)} {_ofn(c.inner)})"
    if isinstance(c, dl.AtMost):
        return f"ObjectMaxCardinality({c.n} {_ofn_role(c.role)} {_ofn(c.inner)})"
    raise TypeError(f"not a concept: {c!r}")


def _exportable(c: dl.Concept) -> dl.Concept:
    try:
        return dl.expand_composition(c)
    except ValueError as exc:
        raise InexpressibleError(f"inexpressible without loss: {exc}") from None


def format_dl_exchange(kb: dl.KnowledgeBase) -> str:
    if dl.dl_fragment(kb) == dl.ALCOIQ_COMPOSITION:
        raise InexpressibleError(
            "inexpressible without loss: the knowledge base counts over a role composition"
        )
    sig = kb.signature
    out = [
        f"Prefix(:=<{BASE}#>)",
        "Prefix(owl:=<http://www.w3.org/2002/07/owl#>)",
        f"Ontology(<{BASE}>",
    ]
    out += [f"Declaration(Class({_iri(n)}))" for n in sig.concepts]
    out += [f"Declaration(ObjectProperty({_iri(n)}))" for n in sig.properties]
    out += [f"Declaration(NamedIndividual({_iri(n)}))" for n in sig.objects]
    axioms = list(kb.axioms)
    i = 0
    while i < len(axioms):
        ax = axioms[i]
        if isinstance(ax, dl.Subsumption):
            sub, sup = _exportable(ax.sub), _exportable(ax.sup)
            nxt = axioms[i + 1] if i + 1 < len(axioms) else None
            if (
                ax.origin is not None
                and isinstance(nxt, dl.Subsumption)
                and nxt.origin == ax.origin
                and nxt.sub == ax.sup
                and nxt.sup == ax.sub
            ):
                out.append(f"EquivalentClasses({_ofn(sub)} {_ofn(sup)})")
                i += 2
                continue
            out.append(f"SubClassOf({_ofn(sub)} {_ofn(sup)})")
        elif isinstance(ax, dl.ConceptAssertion):
            out.append(f"ClassAssertion({_ofn(_exportable(ax.concept))} {_iri(ax.obj)})")
        elif isinstance(ax, dl.RoleAssertion):
            role = dl.normalize_role(ax.role)
            if isinstance(role, dl.Compose):
                raise InexpressibleError("inexpressible without loss: assertion over a role composition")
            out.append(f"ObjectPropertyAssertion({_ofn_role(role)} {_iri(ax.subject)} {_iri(ax.obj)})")
        i += 1
    out.append(")")
    return "\n".join(out) + "\n"


def serialize_kb(kb: dl.KnowledgeBase, fmt: str = NATIVE) -> str:
    if fmt == NATIVE:
        return format_native(kb)
    if fmt == DL_EXCHANGE:
        return format_dl_exchange(kb)
    raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")
