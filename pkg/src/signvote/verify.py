"""Empirical verification suites for the closed-form bounds.

Each suite compares Monte Carlo estimates against their analytic
companions and against the corresponding bound, with margins expressed
in binomial standard errors. Suites return structured results; the CLI
prints one line per check and aggregates the exit status.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bounds import alpha_threshold, verify_bound_cases, vote_failure_bound, wrong_sign_bound
from .core import derive_stream
from .oracle import NoiseModel
from .sim import estimate_p, estimate_vote_failure

__all__ = [
    "CheckResult",
    "SIGN_SUITE_SNRS",
    "VOTE_SUITE_GRID",
    "normal_cdf",
    "run_sign_suite",
    "run_case_suite",
    "run_vote_suite",
]

SIGN_SUITE_SNRS = (0.25, 0.5, 1.0, 2.0, 4.0)

_VOTE_QS = (9, 27, 99)
_VOTE_PS = (0.7, 0.8, 0.9)


def normal_cdf(z: float) -> float:
    """Standard normal CDF via erfc; the oracle for gaussian sign errors."""
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.detail}"


def run_sign_suite(samples: int = 100_000, seed: int = 2024) -> list[CheckResult]:
    """Empirical wrong-sign rate vs its bound and the normal-CDF oracle.

    For gaussian noise at SNR S the exact wrong-sign probability is
    Phi(-S); the empirical rate must sit within 3 standard errors of it
    and below the closed-form bound.
    """
    noise = NoiseModel(family="gaussian", sigma=1.0)
    results = []
    for idx, s in enumerate(SIGN_SUITE_SNRS):
        est = estimate_p(noise, g_i=s, n=1, samples=samples, stream=derive_stream(seed, idx, 0, 0))
        wrong = 1.0 - est.value
        oracle = normal_cdf(-s)
        se = math.sqrt(max(oracle * (1.0 - oracle), 1e-12) / samples)
        bound = wrong_sign_bound(s)
        below_bound = wrong <= bound
        near_oracle = abs(wrong - oracle) <= 3.0 * se
        results.append(
            CheckResult(
                name=f"wrong-sign rate at S={s:g}",
                passed=below_bound and near_oracle,
                detail=(
                    f"empirical={wrong:.5f} oracle={oracle:.5f} bound={bound:.5f} "
                    f"margin={(bound - wrong) / se:+.1f}se oracle_gap={(wrong - oracle) / se:+.1f}se"
                ),
            )
        )
    return results


def run_case_suite(grid_max: float = 10.0, grid_step: float = 0.01) -> list[CheckResult]:
    """Grid audit of the piecewise-vs-unified bound case analysis."""
    report = verify_bound_cases(grid_max=grid_max, grid_step=grid_step)
    results = [
        CheckResult(
            name="case (a) stays below 1/2",
            passed=report.case_a_max <= 0.5 and not any("case (a)" in v for v in report.violations),
            detail=f"max={report.case_a_max:.6f} at S={report.case_a_argmax:.4g}",
        ),
        CheckResult(
            name="case (a) boundary value",
            passed=abs(report.case_a_boundary_value - 5.0 / 12.0) <= 1e-3,
            detail=f"value={report.case_a_boundary_value:.6f} expected~0.416667",
        ),
        CheckResult(
            name="case (b) sqrt(3) <= sqrt(4 + S^2)",
            passed=not any("case (b)" in v for v in report.violations),
            detail="holds on grid",
        ),
        CheckResult(
            name="piecewise bound <= unified bound",
            passed=report.piecewise_min_margin >= -1e-12,
            detail=f"min margin={report.piecewise_min_margin:.3e}",
        ),
    ]
    return results


def vote_suite_grid() -> list[tuple[int, float, float]]:
    """Feasible (q, alpha, p) triples: alpha in {0, 0.2, threshold - 0.05}."""
    grid = []
    for q in _VOTE_QS:
        for p in _VOTE_PS:
            thr = alpha_threshold(p)
            for alpha in (0.0, 0.2, thr - 0.05):
                if 0.0 <= alpha < thr and (1.0 - alpha) * p > 0.5:
                    grid.append((q, alpha, p))
    return grid


VOTE_SUITE_GRID = vote_suite_grid()


def run_vote_suite(trials: int = 100_000, seed: int = 7_191) -> list[CheckResult]:
    """Vote-failure frequency vs the exact binomial and the Cantelli bound."""
    results = []
    for idx, (q, alpha, p) in enumerate(VOTE_SUITE_GRID):
        est = estimate_vote_failure(q, alpha, p, trials, derive_stream(seed, idx, 0, 0))
        se = max(est.std_error, math.sqrt(max(est.exact * (1 - est.exact), 1e-12) / trials))
        bound = vote_failure_bound(q, alpha, p)
        near_exact = abs(est.value - est.exact) <= 3.0 * se
        below_bound = est.value <= bound + 3.0 * se
        vacuous = " (vacuous)" if bound > 1.0 else ""
        results.append(
            CheckResult(
                name=f"vote failure q={q} alpha={alpha:.3g} p={p:g}",
                passed=near_exact and below_bound,
                detail=(
                    f"empirical={est.value:.5f} exact={est.exact:.5f} "
                    f"bound={bound:.4f}{vacuous}"
                ),
            )
        )
    return results
