"""Command-line interface.

Exit codes: 0 positive answer (contained, conforms, success), 1 negative
answer with evidence, 2 unknown at the bound, 3 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from . import dl
from .finite import bounded_model_search
from .fragments import classify
from .kbformat import FORMATS, NATIVE, InexpressibleError, serialize_kb
from .model import Assignment, RdfGraph, ShapeSet, ShapeSetError
from .ntriples import NTriplesError, format_block, parse_ntriples
from .reasoner import (
    DEFAULT_BOUND,
    Contained,
    CounterexampleError,
    NotContained,
    UnsupportedShapes,
    check_supported,
    decide_containment,
    extract_counterexample,
)
from .shacl import SearchTooLarge, faithfulness_violations, find_faithful, missing_targets
from .shapes_syntax import ShapeSyntaxError, format_shapes, parse_constraint, parse_shapes
from .translation import NameBridge, encode_gci, presence_variants, tau_shapes

EXIT_YES, EXIT_NO, EXIT_UNKNOWN, EXIT_ERROR = 0, 1, 2, 3
BOUND_ENV = "SHACLCHECK_BOUND"


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        raise InputError(f"usage: {message}")


# -- helpers ------------------------------------------------------------------


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _shapes(path: str) -> ShapeSet:
    try:
        return parse_shapes(_read(path)).shapes
    except ShapeSyntaxError as exc:
        raise InputError(f"{path}: {exc}") from None


def _graph(path: str) -> RdfGraph:
    try:
        return parse_ntriples(_read(path))
    except NTriplesError as exc:
        raise InputError(f"{path}: {exc}") from None


def _bound(arg: Optional[int]) -> int:
    if arg is not None:
        bound = arg
    elif os.environ.get(BOUND_ENV):
        try:
            bound = int(os.environ[BOUND_ENV])
        except ValueError:
            raise InputError(f"{BOUND_ENV} must be an integer, got {os.environ[BOUND_ENV]!r}") from None
    else:
        bound = DEFAULT_BOUND
    if bound < 1:
        raise InputError("the bound must be at least 1")
    return bound


def _shape_name(shapes: ShapeSet, name: str) -> str:
    if name not in shapes:
        raise InputError(f"unknown shape name {name!r}")
    return name


def _assignment_json(sigma: Assignment, shapes: ShapeSet) -> dict:
    order = {s: i for i, s in enumerate(shapes.names)}
    return {v: sorted(sigma[v], key=lambda s: order.get(s, len(order))) for v in sigma}


def _counterexample_json(graph: RdfGraph, sigma: Assignment, witness: str, shapes: ShapeSet) -> dict:
    return {
        "witness": witness,
        "nodes": list(graph.nodes),
        "triples": [list(t) for t in graph.sorted_triples()],
        "assignment": _assignment_json(sigma, shapes),
        "block": format_block(graph, sigma, shapes.names),
    }


class _Out:
    def __init__(self, as_json: bool) -> None:
        self.as_json = as_json
        self.lines: list[str] = []

    def text(self, line: str = "") -> None:
        self.lines.append(line)

    def emit(self, payload: dict) -> None:
        if self.as_json:
            sys.stdout.write(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
        else:
            sys.stdout.write("".join(line if line.endswith("\n") else line + "\n" for line in self.lines))


# -- commands -----------------------------------------------------------------


def cmd_classify(args, out: _Out) -> int:
    shapes = _shapes(args.shapes)
    frag = classify(shapes)
    witness = None
    if frag.witness is not None:
        w = frag.witness
        witness = {"shape": w.shape, "location": w.location, "construct": w.construct}
        out.text(f"{frag.name} (shape {w.shape}, {w.location}: {w.construct})")
    else:
        out.text(frag.name)
    out.emit({"command": "classify", "fragment": frag.name, "witness": witness})
    return EXIT_YES


def _search(args):
    shapes = _shapes(args.shapes)
    graph = _graph(args.data)
    erratum = not args.pre_erratum
    try:
        found = find_faithful(graph, shapes, 1, erratum=erratum)
    except SearchTooLarge as exc:
        return shapes, graph, None, str(exc)
    if found.assignments:
        return shapes, graph, found, None
    if erratum and missing_targets(graph, shapes):
        sigma = Assignment.for_graph(graph)
        reasons = [r for r in faithfulness_violations(graph, shapes, sigma) if "missing" in r]
        return shapes, graph, found, reasons[0]
    return shapes, graph, found, "no faithful assignment exists"


def _conformance_payload(command: str, found, reason: Optional[str]) -> dict:
    if found is None:
        verdict = "unknown"
    else:
        verdict = "conforms" if found.assignments else "does-not-conform"
    return {
        "command": command,
        "verdict": verdict,
        "strategy": None if found is None else found.strategy,
        "reason": reason,
    }


def cmd_conforms(args, out: _Out) -> int:
    _, _, found, reason = _search(args)
    payload = _conformance_payload("conforms", found, reason)
    if found is None:
        out.text(f"unknown: {reason}")
        out.emit(payload)
        return EXIT_UNKNOWN
    if found.assignments:
        out.text("conforms")
        out.emit(payload)
        return EXIT_YES
    out.text(f"does not conform: {reason}")
    out.emit(payload)
    return EXIT_NO


def cmd_validate(args, out: _Out) -> int:
    shapes, graph, found, reason = _search(args)
    payload = _conformance_payload("validate", found, reason)
    if found is None or not found.assignments:
        payload["assignment"] = None
        out.text(("unknown: " if found is None else "does not conform: ") + reason)
        out.emit(payload)
        return EXIT_UNKNOWN if found is None else EXIT_NO
    sigma = found.assignments[0]
    payload["assignment"] = _assignment_json(sigma, shapes)
    payload["block"] = format_block(graph, sigma, shapes.names)
    out.text(format_block(graph, sigma, shapes.names).split("\n\n", 1)[1])
    out.emit(payload)
    return EXIT_YES


def cmd_translate(args, out: _Out) -> int:
    shapes = _shapes(args.shapes)
    kb = tau_shapes(shapes)
    try:
        text = serialize_kb(kb, args.format)
    except InexpressibleError as exc:
        raise InputError(str(exc)) from None
    out.text(text)
    out.emit({"command": "translate", "format": args.format, "fragment": dl.dl_fragment(kb), "text": text})
    return EXIT_YES


def _verdict_payload(command: str, shapes: ShapeSet, s: str, t: str, bound: int, verdict) -> dict:
    payload = {
        "command": command,
        "shapes": [s, t],
        "fragment": classify(shapes).name,
        "bound": bound,
        "verdict": "unknown",
        "guarantee": None,
        "method": None,
        "counterexample": None,
    }
    if isinstance(verdict, Contained):
        payload.update(verdict="contained", guarantee=verdict.guarantee, method=verdict.method)
        if verdict.guarantee == "sound-only":
            payload["provenance"] = "external-reasoner"
    elif isinstance(verdict, NotContained):
        payload.update(verdict="not-contained", guarantee="complete", method=verdict.method)
        payload["counterexample"] = _counterexample_json(verdict.graph, verdict.assignment, verdict.witness, shapes)
    return payload


def _report(out: _Out, payload: dict, shapes: ShapeSet, s: str, t: str, verdict) -> int:
    if isinstance(verdict, Contained):
        out.text(f"contained: {s} <: {t} ({verdict.guarantee}, {verdict.method})")
        out.emit(payload)
        return EXIT_YES
    if isinstance(verdict, NotContained):
        out.text(f"not contained: node {verdict.witness} has {s} but not {t} ({verdict.method})")
        out.text()
        out.text(format_block(verdict.graph, verdict.assignment, shapes.names))
        out.emit(payload)
        return EXIT_NO
    out.text(f"unknown: no counterexample with at most {payload['bound']} elements")
    out.emit(payload)
    return EXIT_UNKNOWN


def _decide(shapes: ShapeSet, s: str, t: str, bound: int, assume_entailed: bool = False):
    try:
        return decide_containment(shapes, s, t, bound, assume_entailed=assume_entailed)
    except UnsupportedShapes as exc:
        raise InputError(str(exc)) from None


def cmd_contains(args, out: _Out) -> int:
    shapes = _shapes(args.shapes)
    s, t = _shape_name(shapes, args.s), _shape_name(shapes, args.s_prime)
    bound = _bound(args.bound)
    verdict = _decide(shapes, s, t, bound, args.assume_entailed)
    return _report(out, _verdict_payload("contains", shapes, s, t, bound, verdict), shapes, s, t, verdict)


def refute(shapes: ShapeSet, s: str, t: str, bound: int) -> Optional[NotContained]:
    """Bounded counterexample search only; never claims containment."""
    bridge = NameBridge.for_shapes(shapes)
    goal = dl.And(dl.Atomic(bridge.shape(s)), dl.Not(dl.Atomic(bridge.shape(t))))
    for presence in presence_variants(shapes):
        kb = tau_shapes(shapes, presence, bridge)
        model = bounded_model_search(kb, goal, bound, unique_names=kb.signature.objects, tidy=True)
        if model is not None:
            graph, sigma, witness = extract_counterexample(model, shapes, s, t, presence)
            return NotContained(graph, sigma, witness, "bounded-search")
    return None


def cmd_refute(args, out: _Out) -> int:
    shapes = _shapes(args.shapes)
    s, t = _shape_name(shapes, args.s), _shape_name(shapes, args.s_prime)
    bound = _bound(args.bound)
    try:
        check_supported(shapes)
    except UnsupportedShapes as exc:
        raise InputError(str(exc)) from None
    verdict = refute(shapes, s, t, bound)
    payload = _verdict_payload("refute", shapes, s, t, bound, verdict)
    return _report(out, payload, shapes, s, t, verdict)


def cmd_encode_gci(args, out: _Out) -> int:
    shapes = _shapes(args.shapes)
    try:
        phi_c, phi_d = parse_constraint(args.sub), parse_constraint(args.sup)
        enc = encode_gci(phi_c, phi_d, shapes)
    except ShapeSyntaxError as exc:
        raise InputError(f"constraint: {exc}") from None
    except (ShapeSetError, ValueError) as exc:
        raise InputError(str(exc)) from None
    bound = _bound(args.bound)
    verdict = _decide(enc.shapes, enc.sub_shape, enc.sup_shape, bound)
    payload = _verdict_payload("encode-gci", enc.shapes, enc.sub_shape, enc.sup_shape, bound, verdict)
    payload["encoding"] = {
        "sub_shape": enc.sub_shape,
        "sup_shape": enc.sup_shape,
        "marker_class": enc.marker_class,
        "shapes": format_shapes(enc.shapes),
    }
    out.text(format_shapes(ShapeSet(enc.shapes[n] for n in (enc.sub_shape, enc.sup_shape))))
    return _report(out, payload, enc.shapes, enc.sub_shape, enc.sup_shape, verdict)


# -- argument parsing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    parser = _Parser(prog="shaclcheck", description="SHACL validation and shape containment.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("classify", parents=[common], help="language fragment of a shapes file")
    p.add_argument("shapes")
    p.set_defaults(func=cmd_classify)

    for name, func, helptext in (
        ("conforms", cmd_conforms, "does the data graph conform to the shapes?"),
        ("validate", cmd_validate, "print one faithful assignment or the failure reason"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("shapes")
        p.add_argument("data")
        p.add_argument("--pre-erratum", action="store_true", help=argparse.SUPPRESS)
        p.set_defaults(func=func)

    p = sub.add_parser("translate", parents=[common], help="translate shapes to a knowledge base")
    p.add_argument("shapes")
    p.add_argument("--format", choices=FORMATS, default=NATIVE)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("contains", parents=[common], help="is shape s contained in shape s'?")
    p.add_argument("shapes")
    p.add_argument("s")
    p.add_argument("s_prime", metavar="s'")
    p.add_argument("--bound", type=int, default=None, help="largest counterexample size searched")
    p.add_argument(
        "--assume-entailed",
        action="store_true",
        help="report Contained (sound-only) when no counterexample is found, trusting an external proof",
    )
    p.set_defaults(func=cmd_contains)

    p = sub.add_parser("refute", parents=[common], help="search for a containment counterexample")
    p.add_argument("shapes")
    p.add_argument("s")
    p.add_argument("s_prime", metavar="s'")
    p.add_argument("--bound", type=int, default=None)
    p.set_defaults(func=cmd_refute)

    p = sub.add_parser("encode-gci", parents=[common], help="decide C ⊑ D through shape containment")
    p.add_argument("shapes", help="ambient shapes file")
    p.add_argument("sub", help="constraint for C, e.g. '(>= 2 p top)'")
    p.add_argument("sup", help="constraint for D")
    p.add_argument("--bound", type=int, default=None)
    p.set_defaults(func=cmd_encode_gci)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    as_json = "--json" in argv
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, _Out(args.json))
    except (InputError, KeyError) as exc:
        message = str(exc.args[0]) if isinstance(exc, KeyError) and exc.args else str(exc)
        if as_json:
            sys.stdout.write(json.dumps({"error": message}, ensure_ascii=False) + "\n")
        sys.stderr.write(f"shaclcheck: {message}\n")
        return EXIT_ERROR
    except CounterexampleError as exc:  # pragma: no cover - would be a reasoner bug
        sys.stderr.write(f"shaclcheck: internal error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
