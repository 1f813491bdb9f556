#!/usr/bin/env python3
"""Run every empirical verification suite and print one line per check.

Exit status is 0 only if all checks pass.

Usage:
    python scripts/verify_bounds.py [--samples 100000] [--trials 100000]
        [--grid-step 0.01]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from signvote.verify import run_case_suite, run_sign_suite, run_vote_suite


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=100_000)
    parser.add_argument("--trials", type=int, default=100_000)
    parser.add_argument("--grid-step", type=float, default=0.01)
    args = parser.parse_args()

    checks = (
        run_sign_suite(samples=args.samples)
        + run_case_suite(grid_step=args.grid_step)
        + run_vote_suite(trials=args.trials)
    )
    for check in checks:
        print(check.line())
    failed = sum(1 for c in checks if not c.passed)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 0 if failed == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
