"""Run the acceptance criteria and print one PASS/FAIL line each.

Usage: python scripts/run_acceptance.py [criterion ...]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from acceptance import CRITERIA, line, run  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("criteria", nargs="*", help="keys such as 1 4 6b; default all")
    args = parser.parse_args()
    selected = [c for c in CRITERIA if not args.criteria or c[0] in args.criteria]
    failed = 0
    for key, title, check in selected:
        outcome = run(key, title, check)
        print(line(key, title, outcome), flush=True)
        failed += not outcome.passed
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
