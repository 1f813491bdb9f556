import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from signvote.bounds import (
    BoundInputs,
    CASE_SPLIT_SNR,
    InfeasibleError,
    RateForm,
    alpha_threshold,
    compute_report,
    convergence_rate_rhs,
    piecewise_wrong_sign_bound,
    ratio_bound_holds,
    tolerable_byzantine_count,
    verify_bound_cases,
    vote_failure_bound,
    vote_failure_bound_snr,
    wrong_sign_bound,
)


def test_wrong_sign_bound_values():
    assert wrong_sign_bound(0.0) == 0.5
    assert wrong_sign_bound(2.0) == pytest.approx(0.5 - 1.0 / (2.0 * math.sqrt(2.0)))
    assert wrong_sign_bound(2.0 / math.sqrt(3.0)) == pytest.approx(0.25)


def test_wrong_sign_bound_rejects_negative():
    with pytest.raises(ValueError):
        wrong_sign_bound(-0.1)


@given(st.floats(0.0, 100.0), st.floats(0.0, 100.0))
def test_wrong_sign_bound_monotone_decreasing(a, b):
    lo, hi = sorted((a, b))
    assert wrong_sign_bound(lo) >= wrong_sign_bound(hi)


def test_wrong_sign_bound_tends_to_zero():
    assert wrong_sign_bound(1e6) < 1e-6


def test_ratio_bound_equality_case():
    # p = 1 - bound(2): both sides equal 1
    p = 1.0 - wrong_sign_bound(2.0)
    assert ratio_bound_holds(p, 2.0)


def test_ratio_bound_examples():
    assert ratio_bound_holds(0.9, 1.0)  # 0.5625 <= 4
    assert not ratio_bound_holds(0.6, 10.0)  # 24 > 0.04


def test_ratio_bound_rejects_half():
    with pytest.raises(ValueError):
        ratio_bound_holds(0.5, 1.0)


@given(st.floats(0.01, 50.0))
def test_ratio_bound_implied_by_wrong_sign_bound(s):
    # whenever 1 - p <= bound(s), the ratio inequality must hold
    p = 1.0 - wrong_sign_bound(s)
    assert ratio_bound_holds(p, s)
    tighter = min(1.0, p + 0.01)
    if tighter > 0.5:
        assert ratio_bound_holds(tighter, s)


def test_alpha_threshold_values():
    assert alpha_threshold(1.0) == 0.5
    assert alpha_threshold(0.9) == pytest.approx(4.0 / 9.0)
    assert alpha_threshold(0.5001) == pytest.approx(0.0, abs=3e-4)


def test_alpha_threshold_infeasible():
    with pytest.raises(InfeasibleError):
        alpha_threshold(0.5)
    with pytest.raises(InfeasibleError):
        alpha_threshold(0.3)


def test_tolerable_byzantine_count_examples():
    assert tolerable_byzantine_count(27, 0.9) == 11
    assert tolerable_byzantine_count(27, 1.0) == 13
    assert tolerable_byzantine_count(2, 0.75) == 0


def test_tolerable_byzantine_count_below_half():
    for q in (3, 10, 27, 100, 1000):
        for p in (0.51, 0.7, 0.9, 1.0):
            assert tolerable_byzantine_count(q, p) < q / 2


def test_tolerable_byzantine_count_infeasible_p():
    assert tolerable_byzantine_count(27, 0.5) == 0
    assert tolerable_byzantine_count(27, 0.2) == 0


def _strict_predicate(k, q, p_frac):
    # K < (2p - 1)(q - K), evaluated exactly and unrearranged
    num, den = p_frac.numerator, p_frac.denominator
    return k * den < (2 * num - den) * (q - k)


@given(st.integers(3, 400), st.integers(501, 1000))
@settings(max_examples=200)
def test_both_threshold_formulations_agree(q, milli_p):
    p = milli_p / 1000.0
    p_frac = Fraction(str(p))
    k = tolerable_byzantine_count(q, p)
    # formulation 1: maximal K with K < (2p-1)(q-K)
    assert _strict_predicate(k, q, p_frac) or k == 0
    assert not _strict_predicate(k + 1, q, p_frac)
    # formulation 2: maximal K with K/q < 1 - 1/(2p)
    thr = 1 - Fraction(1, 2) / p_frac
    assert Fraction(k, q) < thr or k == 0
    assert not Fraction(k + 1, q) < thr


def test_vote_failure_bound_values():
    assert vote_failure_bound(27, 0.0, 0.9) == pytest.approx(0.072168783648703, abs=1e-12)
    assert vote_failure_bound(99, 1.0 / 3.0, 0.8) == pytest.approx(0.492366, abs=1e-4)


def test_vote_failure_bound_boundary_infeasible():
    p = 0.8
    with pytest.raises(InfeasibleError):
        vote_failure_bound(27, alpha_threshold(p), p)
    with pytest.raises(InfeasibleError):
        vote_failure_bound(27, 0.0, 0.5)


def test_vote_failure_bound_names_violated_condition():
    with pytest.raises(InfeasibleError, match="p > 1/2"):
        vote_failure_bound(27, 0.0, 0.4)
    with pytest.raises(InfeasibleError, match="alpha"):
        vote_failure_bound(27, 0.49, 0.8)


@given(
    st.integers(3, 500),
    st.floats(0.55, 0.99),
    st.floats(0.0, 0.3),
    st.floats(0.001, 0.05),
)
@settings(max_examples=150)
def test_vote_failure_bound_monotonicity(q, p, alpha, eps):
    thr = alpha_threshold(p)
    if alpha + eps >= thr - 1e-9:
        return
    base = vote_failure_bound(q, alpha, p)
    assert vote_failure_bound(q, alpha + eps, p) >= base  # worse with more adversaries
    if p + eps <= 1.0:
        assert vote_failure_bound(q, alpha, p + eps) <= base  # better with accuracy
    assert vote_failure_bound(q + 50, alpha, p) <= base  # better with more voters


def test_vote_failure_bound_snr_form():
    q, alpha, p, s = 27, 0.2, 0.9, 2.0
    expected = (
        math.sqrt(1 - alpha) * (p - 0.5) / (4 * s * math.sqrt(q) * ((1 - alpha) * p - 0.5))
    )
    assert vote_failure_bound_snr(q, alpha, p, s) == pytest.approx(expected)


def test_rate_rhs_frozen_example():
    inputs = BoundInputs(
        q=25, alpha=0.2, p=0.9, sigma_l1=10.0, smoothness_l1=2.0, f0_minus_fstar=2.0, k_iters=100
    )
    assert convergence_rate_rhs(inputs, RateForm.TIGHT) == pytest.approx(0.3165447815, abs=1e-6)
    # fraction itself: sqrt(0.8) * 0.4 / 0.22
    report = compute_report(inputs)
    assert report.rate_rhs_tight == pytest.approx(0.3165447815, abs=1e-6)
    assert report.rate_rhs_loose is not None


def test_rate_fraction_cancels_without_adversaries():
    for p in (0.6, 0.75, 0.99, 1.0):
        inputs = BoundInputs(
            q=25, alpha=0.0, p=p, sigma_l1=1.0, smoothness_l1=1.0, f0_minus_fstar=1.0, k_iters=4
        )
        tight = convergence_rate_rhs(inputs, RateForm.TIGHT)
        # with F = 1 the rate is (4/k) * (1/(4 sqrt(q)) + 1)^2
        expected = (4.0 / 4.0) * (1.0 / (4.0 * 5.0) + 1.0) ** 2
        assert tight == pytest.approx(expected)


@given(st.floats(0.51, 1.0), st.floats(0.0, 0.45))
@settings(max_examples=300)
def test_tight_form_never_exceeds_loose_form(p, alpha):
    if alpha >= alpha_threshold(p) - 1e-9:
        return
    inputs = BoundInputs(
        q=9, alpha=alpha, p=p, sigma_l1=1.0, smoothness_l1=1.0, f0_minus_fstar=1.0, k_iters=10
    )
    assert convergence_rate_rhs(inputs, RateForm.TIGHT) <= convergence_rate_rhs(
        inputs, RateForm.LOOSE
    ) * (1 + 1e-12)


def test_rate_requires_all_inputs():
    with pytest.raises(ValueError, match="k_iters"):
        convergence_rate_rhs(
            BoundInputs(q=9, alpha=0.0, p=0.9, sigma_l1=1.0, smoothness_l1=1.0, f0_minus_fstar=1.0)
        )


def test_case_verification_report():
    report = verify_bound_cases(grid_max=10.0, grid_step=0.01)
    assert report.ok
    assert report.case_a_boundary_value == pytest.approx(5.0 / 12.0, abs=1e-9)
    assert report.case_a_max < 0.5
    assert report.piecewise_min_margin >= 0.0


def test_case_expression_approaches_half_from_below():
    # large-SNR tail climbs toward 1/2 without crossing it
    report = verify_bound_cases(grid_max=200.0, grid_step=0.5)
    assert report.ok
    assert 0.49 < report.case_a_max < 0.5
    assert report.case_a_argmax == pytest.approx(200.0)


def test_piecewise_bound_below_unified_everywhere():
    # includes s = 0, where both collapse to the 1/2 coin flip
    for s in [0.0, 0.01, 0.5, CASE_SPLIT_SNR, 1.2, 2.0, 5.0, 50.0]:
        assert piecewise_wrong_sign_bound(s) <= wrong_sign_bound(s) + 1e-15
    assert piecewise_wrong_sign_bound(0.0) == 0.5


def test_report_clamps_but_keeps_raw():
    report = compute_report(BoundInputs(q=9, alpha=1.0 / 3.0, p=0.8))
    assert report.vote_failure_bound_raw > 1.0
    assert report.vote_failure_bound == 1.0


def test_report_infeasible_p():
    with pytest.raises(InfeasibleError):
        compute_report(BoundInputs(q=9, alpha=0.0, p=0.5))


def test_bound_inputs_validation():
    with pytest.raises(ValueError):
        BoundInputs(q=0, alpha=0.0, p=0.9)
    with pytest.raises(ValueError):
        BoundInputs(q=9, alpha=1.0, p=0.9)
    with pytest.raises(ValueError):
        BoundInputs(q=9, alpha=0.0, p=1.5)
