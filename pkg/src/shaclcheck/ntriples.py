"""N-Triples subset for data graphs, plus the counterexample block format.

A data line is ``<subj> <pred> <obj> .``. Terms are ``<iri>`` (the node name
is the text between the brackets), blank nodes ``_:label`` and plain literals
``"..."`` (the node name keeps its quotes). ``a`` as predicate means the
``type`` property. Blank lines and ``#`` comments are skipped.

A counterexample block is the graph's triples, a blank line, then one line
``ASSIGN <node> shape…`` per node in graph order, so nodes without triples
survive the round trip.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional

from .model import TYPE, Assignment, RdfGraph

_TERM = re.compile(r'\s*(<[^<>\s]*>|_:[A-Za-z0-9_.\-]+|"(?:[^"\\]|\\.)*"(?:\^\^<[^>]*>|@[A-Za-z\-]+)?|a(?=\s))')


class NTriplesError(ValueError):
    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.message = message
        self.line = line


def _term(raw: str, lineno: int) -> str:
    if raw.startswith("<"):
        name = raw[1:-1]
        if not name:
            raise NTriplesError("empty IRI", lineno)
        return name
    if raw.startswith('"') and not raw.endswith('"'):
        raise NTriplesError("typed or language-tagged literals are not supported", lineno)
    return raw


def _split(line: str, lineno: int) -> list[str]:
    terms = []
    pos = 0
    for _ in range(3):
        m = _TERM.match(line, pos)
        if not m:
            raise NTriplesError("malformed triple", lineno)
        terms.append(m.group(1))
        pos = m.end()
    rest = line[pos:].strip()
    if rest != "." and not (rest.startswith(".") and rest[1:].lstrip().startswith("#")):
        raise NTriplesError("expected '.' after the object", lineno)
    return terms


def _triple_line(line: str, lineno: int) -> tuple[str, str, str]:
    s, p, o = _split(line, lineno)
    if s.startswith('"'):
        raise NTriplesError("a literal cannot be a subject", lineno)
    if p == "a":
        pred = TYPE
    elif p.startswith("<"):
        pred = _term(p, lineno)
    else:
        raise NTriplesError("the predicate must be an IRI", lineno)
    if s == "a" or o == "a":
        raise NTriplesError("'a' is only allowed as a predicate", lineno)
    return _term(s, lineno), pred, _term(o, lineno)


def _content_lines(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            yield lineno, None
        else:
            yield lineno, stripped


def parse_ntriples(text: str) -> RdfGraph:
    """Graph whose nodes are all mentioned subjects and objects."""
    triples = []
    for lineno, line in _content_lines(text):
        if line is not None:
            triples.append(_triple_line(line, lineno))
    return RdfGraph.from_triples(triples)


def format_node(name: str) -> str:
    if name.startswith('"') or name.startswith("_:"):
        return name
    if not name or re.search(r"[<>\s]", name):
        raise ValueError(f"node name {name!r} cannot be written as an IRI")
    return f"<{name}>"


def format_ntriples(graph: RdfGraph) -> str:
    return "".join(
        f"{format_node(s)} {'a' if p == TYPE else format_node(p)} {format_node(o)} .\n"
        for s, p, o in graph.sorted_triples()
    )


# -- counterexample blocks ----------------------------------------------------


@dataclass(frozen=True)
class CounterexampleBlock:
    graph: RdfGraph
    assignment: Assignment


def format_block(graph: RdfGraph, assignment: Assignment, shape_order: Optional[Iterable[str]] = None) -> str:
    order = {s: i for i, s in enumerate(shape_order or ())}

    def key(s: str):
        return (order.get(s, len(order)), s)

    lines = [format_ntriples(graph), "\n"]
    for v in graph.nodes:
        names = sorted(assignment.get(v, ()), key=key)
        lines.append(" ".join(["ASSIGN", format_node(v), *names]) + "\n")
    return "".join(lines)


def parse_block(text: str) -> CounterexampleBlock:
    triples = []
    assigned: dict[str, list[str]] = {}
    in_assign = False
    for lineno, line in _content_lines(text):
        if line is None:
            continue
        if line.startswith("ASSIGN"):
            in_assign = True
            rest = line[len("ASSIGN"):]
            m = _TERM.match(rest)
            if not m or m.group(1) == "a":
                raise NTriplesError("ASSIGN needs a node", lineno)
            node = _term(m.group(1), lineno)
            if node in assigned:
                raise NTriplesError(f"node {node} assigned twice", lineno)
            assigned[node] = rest[m.end():].split()
        elif in_assign:
            raise NTriplesError("triple after the ASSIGN section", lineno)
        else:
            triples.append(_triple_line(line, lineno))
    graph = RdfGraph.from_triples(triples, extra_nodes=assigned)
    missing = [v for v in graph.nodes if v not in assigned]
    if missing:
        raise NTriplesError(f"no ASSIGN line for node {missing[0]}", 0)
    ordered = RdfGraph(tuple(assigned), graph.triples)
    return CounterexampleBlock(ordered, Assignment.for_graph(ordered, assigned))
