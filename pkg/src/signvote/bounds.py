"""Closed-form failure bounds and tolerance thresholds for sign voting.

Quantities computed here:

- wrong_sign_bound: upper bound on the probability that one worker's
  transmitted sign disagrees with the true gradient sign, as a function
  of the coordinate's signal-to-noise ratio S:
  1/2 - S / (2 * sqrt(4 + S^2)).
- ratio_bound_holds: the equivalent variance-ratio form
  p(1-p) / (p - 1/2)^2 <= 4 / S^2.
- alpha_threshold: the strict upper bound 1 - 1/(2p) on the adversary
  fraction that still permits the honest majority to win on average.
- tolerable_byzantine_count: the integer worker-count version of the
  same threshold.
- vote_failure_bound: one-sided concentration bound (Cantelli, then
  1 + x^2 >= 2x) on the probability that the aggregated sign of one
  coordinate comes out wrong when all adversaries vote against it.
- convergence_rate_rhs: the resulting bound on the squared average
  gradient l1 norm after k_iters steps with batch size = k_iters.

Raw bound values may exceed 1 (the bound is then vacuous); report
builders keep the raw value alongside a [0, 1]-clamped copy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

__all__ = [
    "InfeasibleError",
    "BoundInputs",
    "BoundReport",
    "RateForm",
    "CaseReport",
    "wrong_sign_bound",
    "piecewise_wrong_sign_bound",
    "ratio_bound_holds",
    "alpha_threshold",
    "tolerable_byzantine_count",
    "vote_failure_bound",
    "vote_failure_bound_snr",
    "rate_fraction",
    "convergence_rate_rhs",
    "verify_bound_cases",
    "compute_report",
]

CASE_SPLIT_SNR = 2.0 / math.sqrt(3.0)


class InfeasibleError(ValueError):
    """Parameters violate a feasibility condition; the message names it."""


class RateForm(str, Enum):
    """The two published variants of the failure-fraction term.

    TIGHT uses sqrt(1 - alpha) * (p - 1/2) in the numerator, LOOSE uses
    sqrt((1 - alpha) * p). TIGHT <= LOOSE everywhere feasible; both are
    reported because the source material states them side by side without
    reconciling them.
    """

    TIGHT = "tight"
    LOOSE = "loose"


def wrong_sign_bound(s: float) -> float:
    """Bound on P[transmitted sign wrong] at SNR s; 1/2 at s=0, decreasing."""
    if s < 0:
        raise ValueError("SNR must be non-negative")
    return 0.5 - s / (2.0 * math.sqrt(4.0 + s * s))


def piecewise_wrong_sign_bound(s: float) -> float:
    """The older two-case bound: 2/(9 s^2) above the split, linear below."""
    if s < 0:
        raise ValueError("SNR must be non-negative")
    if s > CASE_SPLIT_SNR:
        return 2.0 / (9.0 * s * s)
    return 0.5 - s / (2.0 * math.sqrt(3.0))


def ratio_bound_holds(p: float, s: float) -> bool:
    """Check p(1-p)/(p-1/2)^2 <= 4/s^2 for p in (1/2, 1], s > 0.

    Mathematically equivalent to 1 - p <= wrong_sign_bound(s); a relative
    tolerance absorbs rounding at the exact-equality boundary.
    """
    if not 0.5 < p <= 1.0:
        raise ValueError("p must lie in (1/2, 1]")
    if s <= 0:
        raise ValueError("SNR must be positive")
    lhs = p * (1.0 - p) / (p - 0.5) ** 2
    rhs = 4.0 / (s * s)
    return lhs <= rhs or math.isclose(lhs, rhs, rel_tol=1e-9)


def alpha_threshold(p: float) -> float:
    """Strict upper bound 1 - 1/(2p) on the tolerable adversary fraction."""
    if not 0.5 < p <= 1.0:
        raise InfeasibleError(
            "alpha threshold requires p > 1/2 (otherwise no adversaries are tolerable)"
        )
    return 1.0 - 1.0 / (2.0 * p)


def _exact_prob(p: float) -> Fraction:
    # shortest-repr decimal of the float, taken as the intended exact value
    return Fraction(str(float(p)))


def tolerable_byzantine_count(q: int, p: float) -> int:
    """Largest integer K of adversaries with K < (2p - 1) * (q - K).

    Equivalently the largest K with K/q < alpha_threshold(p); the two
    characterizations coincide for every input. Arithmetic is exact over
    the decimal value of p, so boundary cases (e.g. thresholds landing on
    integers) resolve by the strict inequality rather than float rounding.
    """
    if q < 1:
        raise ValueError("worker count q must be positive")
    if not 0.0 < p <= 1.0:
        raise ValueError("p must lie in (0, 1]")
    frac = _exact_prob(p)
    num, den = frac.numerator, frac.denominator
    if 2 * num <= den:  # p <= 1/2
        return 0
    a = q * (2 * num - den)
    b = 2 * num
    return (a - 1) // b if a >= 1 else 0


def _check_alpha_p(alpha: float, p: float) -> None:
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    if not 0.0 < p <= 1.0:
        raise ValueError("p must lie in (0, 1]")
    if p <= 0.5:
        raise InfeasibleError("vote-failure bound requires p > 1/2")
    if alpha >= alpha_threshold(p):
        raise InfeasibleError(
            f"alpha = {alpha:g} violates alpha < 1 - 1/(2p) = {alpha_threshold(p):g}"
        )
    if (1.0 - alpha) * p <= 0.5:
        raise InfeasibleError("(1 - alpha) * p must exceed 1/2")


def _check_feasible(q: int, alpha: float, p: float) -> None:
    if q < 1:
        raise ValueError("worker count q must be positive")
    _check_alpha_p(alpha, p)


def vote_failure_bound(q: int, alpha: float, p: float) -> float:
    """Per-coordinate bound on P[aggregated sign wrong], raw (may exceed 1).

    (1 / (2 sqrt(q))) * sqrt((1-alpha) p (1-p)) / ((1-alpha) p - 1/2).
    """
    _check_feasible(q, alpha, p)
    honest_p = (1.0 - alpha) * p
    return (
        math.sqrt((1.0 - alpha) * p * (1.0 - p)) / (2.0 * math.sqrt(q) * (honest_p - 0.5))
    )


def vote_failure_bound_snr(q: int, alpha: float, p: float, s: float) -> float:
    """SNR-form variant: (1/(4 s sqrt(q))) * sqrt(1-alpha)(p - 1/2) / ((1-alpha)p - 1/2)."""
    _check_feasible(q, alpha, p)
    if s <= 0:
        raise ValueError("SNR must be positive")
    honest_p = (1.0 - alpha) * p
    return math.sqrt(1.0 - alpha) * (p - 0.5) / (4.0 * s * math.sqrt(q) * (honest_p - 0.5))


def rate_fraction(alpha: float, p: float, form: RateForm = RateForm.TIGHT) -> float:
    """The failure-fraction term F entering the convergence-rate bound."""
    _check_alpha_p(alpha, p)
    honest_p = (1.0 - alpha) * p
    if RateForm(form) is RateForm.TIGHT:
        return math.sqrt(1.0 - alpha) * (p - 0.5) / (honest_p - 0.5)
    return math.sqrt(honest_p) / (honest_p - 0.5)


@dataclass(frozen=True)
class BoundInputs:
    """Inputs to the closed-form report; optional fields gate optional outputs."""

    q: int
    alpha: float
    p: float
    s: float | None = None
    sigma_l1: float | None = None
    smoothness_l1: float | None = None
    f0_minus_fstar: float | None = None
    k_iters: int | None = None

    def __post_init__(self) -> None:
        if self.q < 1:
            raise ValueError("q must be positive")
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError("alpha must lie in [0, 1)")
        if not 0.0 < self.p <= 1.0:
            raise ValueError("p must lie in (0, 1]")
        if self.s is not None and self.s < 0:
            raise ValueError("s must be non-negative")
        for name in ("sigma_l1", "smoothness_l1", "f0_minus_fstar"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.k_iters is not None and self.k_iters < 1:
            raise ValueError("k_iters must be positive")


def convergence_rate_rhs(inputs: BoundInputs, form: RateForm = RateForm.TIGHT) -> float:
    """(4 / sqrt(N)) * [sigma_l1/(4 sqrt(q)) * F + sqrt(L_l1 (f0 - f*))]^2, N = k^2."""
    missing = [
        name
        for name in ("sigma_l1", "smoothness_l1", "f0_minus_fstar", "k_iters")
        if getattr(inputs, name) is None
    ]
    if missing:
        raise ValueError(f"convergence rate needs {', '.join(missing)}")
    f = rate_fraction(inputs.alpha, inputs.p, form)
    n_total = float(inputs.k_iters) ** 2
    noise_term = inputs.sigma_l1 / (4.0 * math.sqrt(inputs.q)) * f
    curvature_term = math.sqrt(inputs.smoothness_l1 * inputs.f0_minus_fstar)
    return (4.0 / math.sqrt(n_total)) * (noise_term + curvature_term) ** 2


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


@dataclass(frozen=True)
class BoundReport:
    """All closed-form quantities for one parameter point.

    `*_raw` fields keep the unclamped value so vacuous bounds (> 1) stay
    visible; the unsuffixed probability fields are clamped to [0, 1].
    """

    inputs: BoundInputs
    alpha_threshold: float
    tolerable_byzantine_count: int
    vote_failure_bound_raw: float
    vote_failure_bound: float
    wrong_sign_bound: float | None = None
    vote_failure_bound_snr_raw: float | None = None
    vote_failure_bound_snr: float | None = None
    rate_rhs_tight: float | None = None
    rate_rhs_loose: float | None = None


def compute_report(inputs: BoundInputs) -> BoundReport:
    """Evaluate every bound the inputs allow; raises InfeasibleError early."""
    raw = vote_failure_bound(inputs.q, inputs.alpha, inputs.p)
    wsb = None
    snr_raw = None
    if inputs.s is not None:
        wsb = wrong_sign_bound(inputs.s)
        if inputs.s > 0:
            snr_raw = vote_failure_bound_snr(inputs.q, inputs.alpha, inputs.p, inputs.s)
    have_rate = all(
        getattr(inputs, name) is not None
        for name in ("sigma_l1", "smoothness_l1", "f0_minus_fstar", "k_iters")
    )
    return BoundReport(
        inputs=inputs,
        alpha_threshold=alpha_threshold(inputs.p),
        tolerable_byzantine_count=tolerable_byzantine_count(inputs.q, inputs.p),
        vote_failure_bound_raw=raw,
        vote_failure_bound=_clamp01(raw),
        wrong_sign_bound=wsb,
        vote_failure_bound_snr_raw=snr_raw,
        vote_failure_bound_snr=None if snr_raw is None else _clamp01(snr_raw),
        rate_rhs_tight=convergence_rate_rhs(inputs, RateForm.TIGHT) if have_rate else None,
        rate_rhs_loose=convergence_rate_rhs(inputs, RateForm.LOOSE) if have_rate else None,
    )


def _case_a_expression(s: np.ndarray) -> np.ndarray:
    root = np.sqrt(4.0 + s * s)
    return (4.0 * root + 9.0 * s**3) / (18.0 * s * s * root)


@dataclass(frozen=True)
class CaseReport:
    """Numerical audit of the two-case argument behind the unified bound."""

    grid_max: float
    grid_step: float
    case_a_max: float
    case_a_argmax: float
    case_a_boundary_value: float
    piecewise_min_margin: float
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_bound_cases(grid_max: float = 10.0, grid_step: float = 0.01) -> CaseReport:
    """Grid-check the case analysis relating piecewise and unified bounds.

    Over S in (0, grid_max] stepped by grid_step (plus the analytic split
    point 2/sqrt(3)):
      (a) above the split, (4 sqrt(4+S^2) + 9 S^3) / (18 S^2 sqrt(4+S^2))
          stays <= 1/2;
      (b) at or below the split, sqrt(3) <= sqrt(4 + S^2);
      (c) the piecewise bound never exceeds the unified bound.
    Violations are collected, not raised.
    """
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    count = int(round(grid_max / grid_step))
    grid = np.arange(1, count + 1, dtype=np.float64) * grid_step
    grid = grid[grid <= grid_max + 1e-12]
    grid = np.unique(np.append(grid, CASE_SPLIT_SNR))

    violations: list[str] = []

    above = grid[grid > CASE_SPLIT_SNR]
    expr_above = _case_a_expression(above)
    bad = above[expr_above > 0.5]
    for s in bad:
        violations.append(f"case (a) exceeds 1/2 at S = {s:.6g}")
    boundary_value = float(_case_a_expression(np.array([CASE_SPLIT_SNR]))[0])
    case_a_max = float(expr_above.max()) if above.size else boundary_value
    case_a_argmax = float(above[int(np.argmax(expr_above))]) if above.size else CASE_SPLIT_SNR

    below = grid[grid <= CASE_SPLIT_SNR]
    if below.size and not (np.sqrt(3.0) <= np.sqrt(4.0 + below * below)).all():
        violations.append("case (b) fails: sqrt(3) > sqrt(4 + S^2) somewhere")

    piecewise = np.array([piecewise_wrong_sign_bound(float(s)) for s in grid])
    unified = np.array([wrong_sign_bound(float(s)) for s in grid])
    margins = unified - piecewise
    if (margins < -1e-12).any():
        worst = grid[int(np.argmin(margins))]
        violations.append(f"piecewise bound exceeds unified bound at S = {worst:.6g}")

    return CaseReport(
        grid_max=grid_max,
        grid_step=grid_step,
        case_a_max=case_a_max,
        case_a_argmax=case_a_argmax,
        case_a_boundary_value=boundary_value,
        piecewise_min_margin=float(margins.min()),
        violations=tuple(violations),
    )
