"""Command-line interface: run, sweep, bounds, verify.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 infeasible parameters. The default output directory comes from the
SIGNVOTE_OUT environment variable when --out is not given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from .bounds import BoundInputs, InfeasibleError, compute_report
from .configio import ConfigError, build_manifest, load_config_file
from .report import (
    atomic_write_text,
    line_chart_svg,
    validate_summary_csv,
    validate_trajectory_csv,
    write_summary_csv,
    write_trajectory_csv,
)
from .sim import SWEEP_AXES, run, sweep
from .verify import run_case_suite, run_sign_suite, run_vote_suite

__all__ = ["main"]

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3

_BOUND_CSV_COLUMNS = (
    "q",
    "alpha",
    "p",
    "s",
    "sigma_l1",
    "smoothness_l1",
    "f0_minus_fstar",
    "k_iters",
    "alpha_threshold",
    "tolerable_byzantine_count",
    "wrong_sign_bound",
    "vote_failure_bound_raw",
    "vote_failure_bound",
    "vote_failure_bound_snr_raw",
    "vote_failure_bound_snr",
    "rate_rhs_tight",
    "rate_rhs_loose",
)


def _out_dir(args: argparse.Namespace) -> Path:
    if args.out is not None:
        return Path(args.out)
    return Path(os.environ.get("SIGNVOTE_OUT", "out"))


def _load_config(args: argparse.Namespace):
    config = load_config_file(args.config)
    if args.seed is not None:
        config = replace(config, master_seed=args.seed)
    return config


def cmd_run(args: argparse.Namespace) -> int:
    config = _load_config(args)
    result = run(config, threads=args.threads)
    out = _out_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    trajectory = out / "trajectory.csv"
    write_trajectory_csv(trajectory, result)
    atomic_write_text(
        out / "run_manifest.json",
        json.dumps(build_manifest(config), indent=2, sort_keys=True) + "\n",
    )
    if args.self_check:
        validate_trajectory_csv(trajectory, expected_rows=config.iterations)
    print(f"wrote {trajectory} ({config.iterations} steps, final objective "
          f"{result.final_objective:.6g})")
    return EXIT_OK


def _parse_axis_values(axis: str, raw: str) -> list:
    items = [chunk.strip() for chunk in raw.split(",") if chunk.strip()]
    if not items:
        raise ConfigError("--values must list at least one value")
    if axis in ("byzantine_count", "batch_size"):
        try:
            return [int(item) for item in items]
        except ValueError:
            raise ConfigError(f"--values for axis {axis} must be integers: {raw!r}")
    return items


def cmd_sweep(args: argparse.Namespace) -> int:
    config = _load_config(args)
    values = _parse_axis_values(args.axis, args.values)
    points = sweep(config, args.axis, values, repeats=args.repeats, threads=args.threads)
    out = _out_dir(args)
    out.mkdir(parents=True, exist_ok=True)

    summary = out / "summary.csv"
    write_summary_csv(summary, points)
    for pt in points:
        if pt.result is not None:
            name = f"trajectory_{args.axis}_{pt.axis_value}_rep{pt.repeat}.csv"
            write_trajectory_csv(out / name, pt.result)

    if args.svg == "on":
        series = []
        for value in values:
            runs = [pt.result for pt in points if pt.axis_value == value and pt.result]
            if not runs:
                continue
            steps = list(range(runs[0].config.iterations))
            mean_obj = [
                sum(r.trajectory[t].objective_value for r in runs) / len(runs) for t in steps
            ]
            series.append((f"{args.axis}={value}", steps, mean_obj))
        if series:
            svg = line_chart_svg(
                series,
                title=f"objective vs step (sweep over {args.axis})",
                x_label="step",
                y_label="objective",
            )
            atomic_write_text(out / "sweep.svg", svg)

    if args.self_check:
        validate_summary_csv(summary, expected_rows=len(points))
        for pt in points:
            if pt.result is not None:
                name = f"trajectory_{args.axis}_{pt.axis_value}_rep{pt.repeat}.csv"
                validate_trajectory_csv(out / name, expected_rows=config.iterations)

    failed = sum(1 for pt in points if pt.error is not None)
    print(f"wrote {summary} ({len(points)} points, {failed} infeasible)")
    return EXIT_OK


def _report_cells(report) -> dict:
    def opt(v):
        return "" if v is None else f"{v:.12g}"

    i = report.inputs
    return {
        "q": str(i.q),
        "alpha": f"{i.alpha:.12g}",
        "p": f"{i.p:.12g}",
        "s": opt(i.s),
        "sigma_l1": opt(i.sigma_l1),
        "smoothness_l1": opt(i.smoothness_l1),
        "f0_minus_fstar": opt(i.f0_minus_fstar),
        "k_iters": "" if i.k_iters is None else str(i.k_iters),
        "alpha_threshold": f"{report.alpha_threshold:.12g}",
        "tolerable_byzantine_count": str(report.tolerable_byzantine_count),
        "wrong_sign_bound": opt(report.wrong_sign_bound),
        "vote_failure_bound_raw": f"{report.vote_failure_bound_raw:.12g}",
        "vote_failure_bound": f"{report.vote_failure_bound:.12g}",
        "vote_failure_bound_snr_raw": opt(report.vote_failure_bound_snr_raw),
        "vote_failure_bound_snr": opt(report.vote_failure_bound_snr),
        "rate_rhs_tight": opt(report.rate_rhs_tight),
        "rate_rhs_loose": opt(report.rate_rhs_loose),
    }


def cmd_bounds(args: argparse.Namespace) -> int:
    inputs = BoundInputs(
        q=args.q,
        alpha=args.alpha,
        p=args.p,
        s=args.s,
        sigma_l1=args.sigma_l1,
        smoothness_l1=args.smoothness_l1,
        f0_minus_fstar=args.f0_minus_fstar,
        k_iters=args.k_iters,
    )
    report = compute_report(inputs)
    cells = _report_cells(report)
    if args.format == "csv":
        print(",".join(_BOUND_CSV_COLUMNS))
        print(",".join(cells[c] for c in _BOUND_CSV_COLUMNS))
    else:
        width = max(len(c) for c in _BOUND_CSV_COLUMNS)
        for column in _BOUND_CSV_COLUMNS:
            print(f"{column:<{width}}  {cells[column] or '-'}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    checks = []
    if args.suite in ("sign", "all"):
        seed = 2024 if args.seed is None else args.seed
        checks.extend(run_sign_suite(samples=args.samples, seed=seed))
    if args.suite in ("cases", "all"):
        checks.extend(run_case_suite(grid_step=args.grid_step))
    if args.suite in ("vote", "all"):
        seed = 7_191 if args.seed is None else args.seed
        checks.extend(run_vote_suite(trials=args.trials, seed=seed))
    for check in checks:
        print(check.line())
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_OK if not failed else EXIT_VERIFY_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="signvote",
        description="Simulate sign-vote SGD under adversarial workers and check its bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", default=None, help="output directory (default $SIGNVOTE_OUT or ./out)")
        p.add_argument("--seed", type=int, default=None, help="override the config master_seed")
        p.add_argument("--threads", type=int, default=1, help="worker threads; results are identical for any value")
        p.add_argument("--self-check", action="store_true", help="re-read and validate emitted CSVs")

    p_run = sub.add_parser("run", help="execute one configured run")
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a one-axis parameter sweep")
    common(p_sweep)
    p_sweep.add_argument("--axis", required=True, choices=SWEEP_AXES)
    p_sweep.add_argument("--values", required=True, help="comma-separated axis values")
    p_sweep.add_argument("--repeats", type=int, default=1)
    p_sweep.add_argument("--svg", choices=("on", "off"), default="on")
    p_sweep.set_defaults(func=cmd_sweep)

    p_bounds = sub.add_parser("bounds", help="print the closed-form bound report")
    p_bounds.add_argument("--q", type=int, required=True)
    p_bounds.add_argument("--alpha", type=float, default=0.0)
    p_bounds.add_argument("--p", type=float, required=True)
    p_bounds.add_argument("--s", type=float, default=None)
    p_bounds.add_argument("--sigma-l1", type=float, default=None)
    p_bounds.add_argument("--smoothness-l1", type=float, default=None)
    p_bounds.add_argument("--f0-minus-fstar", type=float, default=None)
    p_bounds.add_argument("--k-iters", type=int, default=None)
    p_bounds.add_argument("--format", choices=("csv", "text"), default="csv")
    p_bounds.set_defaults(func=cmd_bounds)

    p_verify = sub.add_parser("verify", help="run the empirical verification suites")
    p_verify.add_argument("--suite", choices=("sign", "cases", "vote", "all"), default="all")
    p_verify.add_argument("--samples", type=int, default=100_000, help="sign-suite sample budget")
    p_verify.add_argument("--trials", type=int, default=100_000, help="vote-suite trial budget")
    p_verify.add_argument("--grid-step", type=float, default=0.01, help="cases-suite grid step")
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.set_defaults(func=cmd_verify)

    return parser


def main(argv: "list[str] | None" = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleError as exc:
        print(f"infeasible parameters: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
