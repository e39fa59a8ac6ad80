"""Compare decide_containment with the exhaustive oracle on generated
inverse-free shape sets and report the totals.

Usage: python scripts/oracle_agreement.py [--count N] [--start K]
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from corpus import Agreement, check_agreement, lnoinv_corpus  # noqa: E402
from shaclcheck.shapes_syntax import format_shapes  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--count", type=int, default=100)
    parser.add_argument("--start", type=int, default=0)
    args = parser.parse_args()
    report = Agreement()
    start = time.perf_counter()
    for shapes in lnoinv_corpus(args.count, args.start):
        check_agreement(shapes, report)
    took = time.perf_counter() - start
    print(
        f"{args.count} shape sets, {report.pairs} pairs: {report.contained} contained, "
        f"{report.refuted} refuted, {len(report.disagreements)} disagreements ({took:.1f}s)"
    )
    for shapes, s, t, verdict, known in report.disagreements:
        print(f"\n{s} <: {t}: reasoner {verdict!r}, oracle counterexample {known!r}")
        print(format_shapes(shapes))
    return 1 if report.disagreements else 0


if __name__ == "__main__":
    sys.exit(main())
