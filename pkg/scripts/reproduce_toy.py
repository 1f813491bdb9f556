#!/usr/bin/env python3
"""Reproduce the two-panel toy figure: objective vs step for several
adversary counts, one panel per batch size (1 and 500).

Setup: 1000-dimensional quadratic, 27 workers, unit gaussian noise,
lr 1/sqrt(t+1), 500 iterations, omniscient adversaries. Writes one
summary CSV, per-run trajectory CSVs, and one SVG per batch size.

Usage:
    python scripts/reproduce_toy.py --out results/toy [--repeats 3]
        [--seed 7] [--quick]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from signvote.oracle import BatchSchedule, NoiseModel, Objective
from signvote.report import (
    atomic_write_text,
    line_chart_svg,
    write_summary_csv,
    write_trajectory_csv,
)
from signvote.sim import FleetConfig, RunConfig, sweep


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/toy", help="output directory")
    parser.add_argument("--repeats", type=int, default=1)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--adversaries", default="0,9,13",
                        help="comma-separated adversary counts")
    parser.add_argument("--quick", action="store_true", help="100 iterations instead of 500")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    b_values = [int(v) for v in args.adversaries.split(",")]
    iterations = 100 if args.quick else 500

    all_points = []
    for batch in (1, 500):
        base = RunConfig(
            objective=Objective(dim=1000),
            fleet=FleetConfig(
                q=27,
                byzantine_count=0,
                attack="omniscient_optimal",
                batch=BatchSchedule("constant", batch),
                noise=NoiseModel(sigma=1.0),
            ),
            iterations=iterations,
            initial_lr=1.0,
            lr_schedule="inv_sqrt",
            master_seed=args.seed + batch,
        )
        points = sweep(base, "byzantine_count", b_values, repeats=args.repeats)
        all_points.extend(points)

        series = []
        for b in b_values:
            runs = [pt.result for pt in points if pt.axis_value == b and pt.result]
            steps = list(range(iterations))
            mean_obj = [
                sum(r.trajectory[t].objective_value for r in runs) / len(runs) for t in steps
            ]
            series.append((f"adversaries={b}", steps, mean_obj))
        svg = line_chart_svg(
            series,
            title=f"sign-vote SGD, 27 workers, batch {batch}",
            x_label="step",
            y_label="objective",
        )
        atomic_write_text(out / f"toy_batch{batch}.svg", svg)
        for pt in points:
            if pt.result is not None:
                write_trajectory_csv(
                    out / f"trajectory_batch{batch}_b{pt.axis_value}_rep{pt.repeat}.csv",
                    pt.result,
                )
        print(f"batch {batch}: " + ", ".join(
            f"b={b} final={next(pt.result.final_objective for pt in points if pt.axis_value == b and pt.repeat == 0):.4g}"
            for b in b_values
        ))

    write_summary_csv(out / "summary.csv", all_points)
    print(f"wrote {out}/summary.csv and two SVG panels")
    return 0


if __name__ == "__main__":
    sys.exit(main())
