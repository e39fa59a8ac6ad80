"""Print the containment verdict for every ordered pair of shapes in a file.

Usage: python scripts/containment_matrix.py SHAPES [--bound N]
"""

from __future__ import annotations

import argparse
import sys

from shaclcheck.fragments import classify
from shaclcheck.reasoner import DEFAULT_BOUND, Contained, NotContained, decide_containment
from shaclcheck.shapes_syntax import parse_shapes


def cell(verdict) -> str:
    if isinstance(verdict, Contained):
        return "yes" if verdict.guarantee == "complete" else "yes*"
    if isinstance(verdict, NotContained):
        return "no"
    return "?"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("shapes")
    parser.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    args = parser.parse_args()
    with open(args.shapes, encoding="utf-8") as fh:
        shapes = parse_shapes(fh.read()).shapes
    names = list(shapes.names)
    width = max(len(n) for n in names) if names else 0
    print(f"fragment: {classify(shapes).name}; rows s, columns s'; yes* = sound-only, ? = unknown")
    print(" " * width + "  " + "  ".join(names))
    for s in names:
        row = [cell(decide_containment(shapes, s, t, args.bound)).ljust(len(t)) for t in names]
        print(s.ljust(width) + "  " + "  ".join(row))
    return 0


if __name__ == "__main__":
    sys.exit(main())
