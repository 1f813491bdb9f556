import math

import numpy as np
import pytest
import scipy.stats

from signvote.adversary import AttackStrategy
from signvote.bounds import InfeasibleError, vote_failure_bound
from signvote.core import GradVector, derive_stream
from signvote.oracle import BatchSchedule, NoiseModel, Objective
from signvote.sim import (
    FleetConfig,
    RunConfig,
    byzantine_count_from_fraction,
    derive_run_seed,
    estimate_p,
    estimate_vote_failure,
    exact_vote_failure,
    frozen_vote_flip_counts,
    run,
    sweep,
)
from signvote.verify import normal_cdf

NOISELESS = NoiseModel(sigma=0.0)


def _config(**kw):
    defaults = dict(
        objective=Objective(dim=2),
        fleet=FleetConfig(q=3, byzantine_count=0, noise=NOISELESS),
        iterations=12,
        initial_lr=1.0,
        lr_schedule="constant",
        master_seed=0,
        x0=GradVector([10.0, -10.0]),
    )
    defaults.update(kw)
    return RunConfig(**defaults)


def test_noiseless_hand_simulation():
    # x moves one unit toward zero per step; strictly inside the unit box
    # for the first time after exactly 10 steps
    result = run(_config())
    assert len(result.trajectory) == 12
    objectives = [rec.objective_value for rec in result.trajectory]
    assert objectives[:4] == [100.0, 81.0, 64.0, 49.0]
    assert objectives[10] == 0.0
    assert objectives[9] == 1.0
    assert result.final_objective == 0.0
    # after reaching zero the gradient is zero: votes all 0, ties recorded
    assert result.trajectory[11].tie_coords == 2
    assert all(rec.flipped_coords == 0 for rec in result.trajectory)


def test_update_rule_fidelity_via_independent_replay():
    # replay the whole protocol outside the simulator, drawing from the same
    # addressed streams, and demand exact float equality of every record:
    # x_{t+1} = x_t - lr * (broadcast_sign + wd * x_t)
    d, q, b = 5, 5, 2
    cfg = RunConfig(
        objective=Objective(dim=d),
        fleet=FleetConfig(q=q, byzantine_count=b, attack="blind_flip",
                          noise=NoiseModel(sigma=1.0)),
        iterations=20,
        initial_lr=0.5,
        lr_schedule="inv_sqrt",
        weight_decay=0.01,
        master_seed=9,
        x0=GradVector([1.0, -2.0, 3.0, -4.0, 5.0]),
    )
    result = run(cfg)

    noise = cfg.fleet.noise
    honest = q - b
    x = cfg.resolve_x0()
    for t, rec in enumerate(result.trajectory):
        n_t = cfg.fleet.batch.size_at(t + 1)
        assert rec.lr == cfg.lr_at(t)
        assert rec.objective_value == 0.5 * float(np.dot(x, x))
        assert rec.grad_l1 == float(np.abs(x).sum())
        estimates = [
            x + noise.batch_mean_noise(n_t, d, derive_stream(9, w, t, 0).generator())
            for w in range(q)
        ]
        votes = [np.sign(e) for e in estimates[:honest]]
        votes += [-np.sign(e) for e in estimates[honest:]]  # blind flip
        tally = np.sum(votes, axis=0)
        out = np.sign(tally)
        g_sign = np.sign(x)
        expect_flips = int(np.count_nonzero((g_sign != 0) & (out == -g_sign)))
        assert rec.flipped_coords == expect_flips
        assert rec.tie_coords == int(np.count_nonzero(tally == 0))
        x = x - rec.lr * (out + cfg.weight_decay * x)
    assert result.final_objective == 0.5 * float(np.dot(x, x))


def test_noiseless_b13_matches_adversary_free():
    base = dict(
        objective=Objective(dim=4),
        iterations=30,
        initial_lr=1.0,
        lr_schedule="inv_sqrt",
        master_seed=3,
        x0=GradVector([4.0, -3.0, 2.0, -1.0]),
    )
    r13 = run(RunConfig(fleet=FleetConfig(q=27, byzantine_count=13,
                                          attack="omniscient_optimal", noise=NOISELESS), **base))
    r0 = run(RunConfig(fleet=FleetConfig(q=27, byzantine_count=0, noise=NOISELESS), **base))
    assert [r.objective_value for r in r13.trajectory] == [
        r.objective_value for r in r0.trajectory
    ]
    assert all(rec.flipped_coords == 0 for rec in r13.trajectory)


def test_noiseless_b14_flips_everything_and_diverges():
    result = run(
        RunConfig(
            objective=Objective(dim=4),
            fleet=FleetConfig(q=27, byzantine_count=14, attack="omniscient_optimal",
                              noise=NOISELESS),
            iterations=30,
            initial_lr=1.0,
            lr_schedule="inv_sqrt",
            master_seed=3,
            x0=GradVector([4.0, -3.0, 2.0, -1.0]),
        )
    )
    objectives = [rec.objective_value for rec in result.trajectory]
    assert all(b > a for a, b in zip(objectives, objectives[1:]))
    assert all(rec.flipped_coords == 4 for rec in result.trajectory)


def test_thread_count_does_not_change_results():
    cfg = RunConfig(
        objective=Objective(dim=50),
        fleet=FleetConfig(q=9, byzantine_count=3, attack="adversary_server",
                          noise=NoiseModel(sigma=1.0)),
        iterations=25,
        master_seed=123,
    )
    r1 = run(cfg, threads=1)
    r4 = run(cfg, threads=4)
    for a, b in zip(r1.trajectory, r4.trajectory):
        assert a == b
    assert r1.final_objective == r4.final_objective


def test_infeasible_config_rejected_before_running():
    with pytest.raises(InfeasibleError):
        FleetConfig(q=3, byzantine_count=3)
    with pytest.raises(InfeasibleError):
        RunConfig(iterations=0)


def test_byzantine_count_from_fraction():
    assert byzantine_count_from_fraction(9, 1.0 / 3.0) == 3
    assert byzantine_count_from_fraction(9, 0.2) == 1
    assert byzantine_count_from_fraction(27, 0.0) == 0
    assert byzantine_count_from_fraction(20, 0.45) == 9
    assert byzantine_count_from_fraction(10, 0.449) == 4


def test_estimate_p_gaussian_snr1():
    est = estimate_p(NoiseModel(sigma=1.0), g_i=1.0, n=1, samples=100_000,
                     stream=derive_stream(71))
    oracle = normal_cdf(1.0)
    assert abs(est.value - oracle) <= 0.0035
    assert est.std_error == pytest.approx(math.sqrt(est.value * (1 - est.value) / 100_000))
    assert not est.arbitrary_reference


def test_estimate_p_noiseless_is_one():
    est = estimate_p(NOISELESS, g_i=2.0, n=1, samples=1000, stream=derive_stream(1))
    assert est.value == 1.0
    assert est.std_error == 0.0


def test_estimate_p_zero_gradient_flagged():
    est = estimate_p(NoiseModel(sigma=1.0), g_i=0.0, n=1, samples=50_000,
                     stream=derive_stream(2))
    assert est.arbitrary_reference
    assert abs(est.value - 0.5) <= 0.01


def test_estimate_p_batch_averaging():
    # n = 4 doubles the SNR: p ~ Phi(2)
    est = estimate_p(NoiseModel(sigma=1.0), g_i=1.0, n=4, samples=100_000,
                     stream=derive_stream(72))
    assert abs(est.value - normal_cdf(2.0)) <= 0.002


def test_exact_vote_failure_spot_values():
    assert exact_vote_failure(9, 1.0 / 3.0, 0.8) == pytest.approx(0.34464, abs=1e-10)
    assert exact_vote_failure(9, 0.0, 1.0) == 0.0
    assert exact_vote_failure(99, 1.0 / 3.0, 0.8) == pytest.approx(0.154798, abs=1e-5)


def test_exact_vote_failure_matches_scipy():
    for q, alpha, p in [(9, 1.0 / 3.0, 0.8), (27, 0.2, 0.7), (99, 0.0, 0.9), (10, 0.3, 0.6)]:
        m = q - byzantine_count_from_fraction(q, alpha)
        kstar = math.ceil(q / 2) - 1
        expected = float(scipy.stats.binom.cdf(kstar, m, p))
        assert exact_vote_failure(q, alpha, p) == pytest.approx(expected, abs=1e-12)


def test_estimate_vote_failure_against_exact():
    est = estimate_vote_failure(9, 1.0 / 3.0, 0.8, trials=100_000, stream=derive_stream(88))
    assert est.exact == pytest.approx(0.34464, abs=1e-10)
    assert abs(est.value - est.exact) <= 3.0 * est.std_error


def test_estimate_vote_failure_perfect_workers():
    est = estimate_vote_failure(27, 0.0, 1.0, trials=10_000, stream=derive_stream(4))
    assert est.value == 0.0
    assert est.exact == 0.0


def test_empirical_failure_below_bound():
    q, alpha, p = 99, 1.0 / 3.0, 0.8
    est = estimate_vote_failure(q, alpha, p, trials=100_000, stream=derive_stream(5))
    bound = vote_failure_bound(q, alpha, p)
    assert est.value <= bound + 3.0 * est.std_error
    assert est.exact <= bound


def test_frozen_vote_flips_agree_with_binomial_model():
    # mechanistic per-coordinate flips at frozen x must match the i.i.d.
    # Bernoulli abstraction: flip prob = exact binomial failure at p = Phi(S)
    d, q, b, steps = 400, 27, 6, 40
    x = GradVector(np.ones(d))
    counts = frozen_vote_flip_counts(
        Objective(dim=d), x, NoiseModel(sigma=1.0), 1, q,
        [b], [AttackStrategy.OMNISCIENT_OPTIMAL], steps, master_seed=2_000,
    )
    flips = counts[(AttackStrategy.OMNISCIENT_OPTIMAL, b)]
    p = normal_cdf(1.0)
    alpha = b / q
    expected = exact_vote_failure(q, alpha, p)
    total = d * steps
    rate = flips.sum() / total
    se = math.sqrt(expected * (1 - expected) / total)
    assert abs(rate - expected) <= 3.5 * se
    assert rate <= vote_failure_bound(q, alpha, p) + 3.0 * se


def test_frozen_vote_dominance_small():
    d, q, steps = 200, 9, 25
    x = GradVector(np.full(d, 0.5))
    attacks = [
        AttackStrategy.OMNISCIENT_OPTIMAL,
        AttackStrategy.BLIND_FLIP,
        AttackStrategy.ADVERSARY_SERVER,
    ]
    counts = frozen_vote_flip_counts(
        Objective(dim=d), x, NoiseModel(sigma=1.0), 1, q, [1, 2, 4], attacks, steps, 77,
    )
    for b in (1, 2, 4):
        omni = counts[(AttackStrategy.OMNISCIENT_OPTIMAL, b)]
        assert np.all(omni >= counts[(AttackStrategy.BLIND_FLIP, b)])
        assert np.all(omni >= counts[(AttackStrategy.ADVERSARY_SERVER, b)])


def test_sweep_cardinality_and_order():
    base = _config(iterations=5)
    points = sweep(base, "byzantine_count", [0, 1, 2], repeats=2)
    assert len(points) == 6
    assert [(pt.axis_value, pt.repeat) for pt in points] == [
        (0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)
    ]
    seeds = [pt.seed for pt in points]
    assert len(set(seeds)) == 6
    assert seeds == [derive_run_seed(base.master_seed, i, r) for i in range(3) for r in range(2)]


def test_sweep_records_infeasible_points_and_continues():
    base = _config(iterations=5)
    points = sweep(base, "byzantine_count", [0, 99], repeats=1)
    assert points[0].result is not None
    assert points[1].result is None
    assert points[1].error is not None


def test_sweep_attack_axis():
    base = RunConfig(
        objective=Objective(dim=10),
        fleet=FleetConfig(q=9, byzantine_count=2, noise=NoiseModel(sigma=1.0)),
        iterations=10,
        master_seed=55,
    )
    points = sweep(base, "attack", ["blind_flip", "omniscient_optimal"], repeats=1)
    assert all(pt.result is not None for pt in points)
    assert points[0].result.config.fleet.attack is AttackStrategy.BLIND_FLIP


def test_sweep_batch_axis():
    base = _config(iterations=5, fleet=FleetConfig(q=3, noise=NoiseModel(sigma=1.0)))
    points = sweep(base, "batch_size", [1, 500], repeats=1)
    assert points[1].result.config.fleet.batch.size == 500


def test_sweep_rejects_unknown_axis():
    with pytest.raises(ValueError):
        sweep(_config(), "learning_rate", [1], repeats=1)


def test_attack_axis_final_objective_ordering():
    # the always-against attack hurts convergence at least as much as the
    # blind one; compared on 3-seed means since trajectories branch early
    base = RunConfig(
        objective=Objective(dim=1000),
        fleet=FleetConfig(q=27, byzantine_count=9, noise=NoiseModel(sigma=1.0),
                          batch=BatchSchedule("constant", 1)),
        iterations=200,
        master_seed=500,
    )
    points = sweep(base, "attack", ["blind_flip", "omniscient_optimal"], repeats=3)
    means = {}
    for value in ("blind_flip", "omniscient_optimal"):
        finals = [pt.result.final_objective for pt in points if pt.axis_value == value]
        means[value] = sum(finals) / len(finals)
    assert means["omniscient_optimal"] >= means["blind_flip"]


def test_vote_failure_bound_raw_can_be_vacuous():
    # raw bound above 1 stays visible; the empirical rate is of course below it
    bound = vote_failure_bound(9, 1.0 / 3.0, 0.8)
    assert bound == pytest.approx(1.63299, abs=1e-5)
    est = estimate_vote_failure(9, 1.0 / 3.0, 0.8, trials=20_000, stream=derive_stream(6))
    assert est.value <= bound


def test_run_with_iteration_counter_batches():
    # n_t = t (1-indexed): replay the protocol with the growing batch and
    # demand exact agreement, which pins the schedule indexing
    d, q = 8, 5
    cfg = RunConfig(
        objective=Objective(dim=d),
        fleet=FleetConfig(q=q, byzantine_count=0,
                          batch=BatchSchedule("iteration_counter"),
                          noise=NoiseModel(sigma=1.0)),
        iterations=15,
        master_seed=14,
        x0=GradVector([2.0] * d),
    )
    result = run(cfg)
    assert len(result.trajectory) == 15
    noise = cfg.fleet.noise
    x = cfg.resolve_x0()
    for t, rec in enumerate(result.trajectory):
        assert rec.objective_value == 0.5 * float(np.dot(x, x))
        votes = [
            np.sign(x + noise.batch_mean_noise(t + 1, d, derive_stream(14, w, t, 0).generator()))
            for w in range(q)
        ]
        out = np.sign(np.sum(votes, axis=0))
        x = x - rec.lr * out
    assert result.final_objective == 0.5 * float(np.dot(x, x))


def test_attack_none_with_nominal_adversaries_matches_protocol():
    # "none" means the nominal adversaries follow the protocol; the honest
    # workers' streams are independent of the attack configuration
    base = dict(
        objective=Objective(dim=20),
        iterations=15,
        master_seed=321,
    )
    noisy = NoiseModel(sigma=1.0)
    r_none = run(RunConfig(fleet=FleetConfig(q=9, byzantine_count=4, attack="none", noise=noisy), **base))
    r_zero = run(RunConfig(fleet=FleetConfig(q=9, byzantine_count=0, attack="none", noise=noisy), **base))
    assert [r.objective_value for r in r_none.trajectory] == [
        r.objective_value for r in r_zero.trajectory
    ]
