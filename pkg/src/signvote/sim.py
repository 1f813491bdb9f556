"""The training loop and the Monte Carlo estimators that check the bounds.

The loop follows the sign-vote protocol exactly: every honest worker
draws a batch-averaged stochastic gradient and pushes its sign; the
adversaries vote per the configured attack; the server sums the votes,
broadcasts the sign of the total, and every worker applies the identical
update x <- x - lr * (broadcast_sign + weight_decay * x).

Randomness is addressed by (master_seed, worker_id, step, substream), so
trajectories are bit-reproducible for any thread count.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .adversary import AdversaryKnowledge, AttackStrategy, attack_votes, needs_own_estimates
from .bounds import InfeasibleError
from .core import GradVector, RngStream, majority_vote, sign_of
from .oracle import BatchSchedule, NoiseModel, Objective, stochastic_gradient, true_gradient

__all__ = [
    "FleetConfig",
    "RunConfig",
    "StepRecord",
    "RunResult",
    "SweepPoint",
    "PEstimate",
    "FailureEstimate",
    "byzantine_count_from_fraction",
    "run",
    "estimate_p",
    "exact_vote_failure",
    "estimate_vote_failure",
    "sweep",
    "frozen_vote_flip_counts",
    "derive_run_seed",
]

SWEEP_AXES = ("byzantine_count", "batch_size", "attack")


def byzantine_count_from_fraction(q: int, alpha: float) -> int:
    """floor(alpha * q), snapping float dust so e.g. alpha=1/3, q=9 gives 3."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    x = alpha * q
    nearest = round(x)
    if abs(x - nearest) <= 1e-9 * max(1.0, abs(x)):
        return int(nearest)
    return int(math.floor(x))


@dataclass(frozen=True)
class FleetConfig:
    """Worker population: total size, adversary count, attack, batch, noise."""

    q: int = 27
    byzantine_count: int = 0
    attack: AttackStrategy = AttackStrategy.NONE
    batch: BatchSchedule = field(default_factory=BatchSchedule)
    noise: NoiseModel = field(default_factory=NoiseModel)

    def __post_init__(self) -> None:
        object.__setattr__(self, "attack", AttackStrategy(self.attack))
        if self.q < 1:
            raise InfeasibleError("q must be positive")
        if self.byzantine_count < 0:
            raise InfeasibleError("byzantine_count must be non-negative")
        if self.byzantine_count >= self.q:
            raise InfeasibleError(
                f"byzantine_count = {self.byzantine_count} needs at least one honest "
                f"worker (q = {self.q})"
            )

    @property
    def alpha(self) -> float:
        return self.byzantine_count / self.q

    @property
    def honest_count(self) -> int:
        return self.q - self.byzantine_count


@dataclass(frozen=True)
class RunConfig:
    objective: Objective = field(default_factory=Objective)
    fleet: FleetConfig = field(default_factory=FleetConfig)
    iterations: int = 500
    initial_lr: float = 1.0
    lr_schedule: str = "inv_sqrt"
    weight_decay: float = 0.0
    master_seed: int = 0
    x0: "GradVector | str" = "ones"

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise InfeasibleError("iterations must be positive")
        if self.initial_lr <= 0:
            raise InfeasibleError("initial_lr must be positive")
        if self.lr_schedule not in ("constant", "inv_sqrt"):
            raise ValueError(f"unknown lr_schedule {self.lr_schedule!r}")
        if self.weight_decay < 0:
            raise InfeasibleError("weight_decay must be non-negative")
        if isinstance(self.x0, GradVector) and self.x0.dim != self.objective.dim:
            raise InfeasibleError("x0 dimension does not match the objective")
        if isinstance(self.x0, str) and self.x0 != "ones":
            raise ValueError(f"unknown x0 initializer {self.x0!r}")

    def lr_at(self, t: int) -> float:
        """Learning rate at zero-indexed step t."""
        if self.lr_schedule == "constant":
            return self.initial_lr
        return self.initial_lr / math.sqrt(t + 1.0)

    def resolve_x0(self) -> np.ndarray:
        if isinstance(self.x0, GradVector):
            return self.x0.entries.copy()
        return np.ones(self.objective.dim)


@dataclass(frozen=True)
class StepRecord:
    step: int
    objective_value: float
    grad_l1: float
    lr: float
    flipped_coords: int
    tie_coords: int


@dataclass(frozen=True)
class RunResult:
    config: RunConfig
    trajectory: tuple[StepRecord, ...]
    final_objective: float
    wall_time_seconds: float

    def objective_series(self) -> np.ndarray:
        return np.array([rec.objective_value for rec in self.trajectory])

    def mean_flip_rate(self) -> float:
        d = self.config.objective.dim
        return float(np.mean([rec.flipped_coords for rec in self.trajectory])) / d


def _worker_estimate(config: RunConfig, x_vec: GradVector, n: int, worker: int, t: int) -> GradVector:
    stream = RngStream(config.master_seed, worker, t, 0)
    return stochastic_gradient(config.objective, x_vec, config.fleet.noise, n, stream)


def run(config: RunConfig, threads: int = 1) -> RunResult:
    """Execute the full protocol for config.iterations steps."""
    if threads < 1:
        raise ValueError("threads must be at least 1")
    fleet = config.fleet
    obj = config.objective
    attack = fleet.attack
    b = fleet.byzantine_count if attack is not AttackStrategy.NONE else 0
    honest = fleet.q - b
    draw_adversary_estimates = b > 0 and needs_own_estimates(attack)
    drawing_ids = list(range(honest + b)) if draw_adversary_estimates else list(range(honest))

    x = config.resolve_x0()
    records: list[StepRecord] = []
    started = time.perf_counter()
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for t in range(config.iterations):
            n_t = fleet.batch.size_at(t + 1)
            x_vec = GradVector(x)
            g = true_gradient(obj, x_vec)
            g_sign = np.sign(g.entries).astype(np.int8)

            if pool is not None:
                estimates = list(
                    pool.map(lambda w: _worker_estimate(config, x_vec, n_t, w, t), drawing_ids)
                )
            else:
                estimates = [_worker_estimate(config, x_vec, n_t, w, t) for w in drawing_ids]

            votes = [sign_of(est) for est in estimates[:honest]]
            if b > 0:
                knowledge = AdversaryKnowledge(
                    true_gradient=g,
                    honest_votes=tuple(votes),
                    own_estimates=tuple(estimates[honest:]),
                )
                votes.extend(attack_votes(attack, knowledge, b))

            tally, out = majority_vote(votes)
            nonzero = g_sign != 0
            flipped = int(np.count_nonzero(nonzero & (out.entries == -g_sign)))
            ties = int(np.count_nonzero(tally.sums == 0))
            lr = config.lr_at(t)
            records.append(
                StepRecord(
                    step=t,
                    objective_value=obj.value(x_vec),
                    grad_l1=float(np.abs(g.entries).sum()),
                    lr=lr,
                    flipped_coords=flipped,
                    tie_coords=ties,
                )
            )
            x = x - lr * (out.entries + config.weight_decay * x)
    finally:
        if pool is not None:
            pool.shutdown()

    final = obj.value(GradVector(x))
    return RunResult(
        config=config,
        trajectory=tuple(records),
        final_objective=final,
        wall_time_seconds=time.perf_counter() - started,
    )


@dataclass(frozen=True)
class PEstimate:
    """Monte Carlo estimate of P[transmitted sign matches the true sign]."""

    value: float
    std_error: float
    samples: int
    arbitrary_reference: bool = False


def estimate_p(
    noise: NoiseModel, g_i: float, n: int, samples: int, stream: RngStream
) -> PEstimate:
    """Estimate the per-coordinate correct-sign probability by sampling.

    When g_i == 0 the notion of a correct sign is undefined; the estimate
    is then the match rate against the reference sign +1 and the result
    is flagged `arbitrary_reference`.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = stream.generator()
    reference = 1.0 if g_i == 0.0 else math.copysign(1.0, g_i)
    matches = 0
    chunk = max(1, min(samples, 8_000_000 // max(1, n)))
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        draws = g_i + noise.batch_mean_noise(n, m, rng)
        matches += int(np.count_nonzero(np.sign(draws) == reference))
        done += m
    p_hat = matches / samples
    return PEstimate(
        value=p_hat,
        std_error=math.sqrt(p_hat * (1.0 - p_hat) / samples),
        samples=samples,
        arbitrary_reference=(g_i == 0.0),
    )


def _vote_fail_threshold(q: int) -> int:
    """Largest count of correct votes that still loses: Z < q/2."""
    return (q + 1) // 2 - 1


def exact_vote_failure(q: int, alpha: float, p: float) -> float:
    """P[Binomial(q - floor(alpha q), p) < q/2], summed exactly.

    The analytic companion to `estimate_vote_failure`; adversaries never
    vote correctly under the strongest attack, so only the honest workers
    contribute correct signs.
    """
    if q < 1:
        raise ValueError("q must be positive")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    m = q - byzantine_count_from_fraction(q, alpha)
    kstar = min(_vote_fail_threshold(q), m)
    if kstar < 0:
        return 0.0
    return float(
        sum(math.comb(m, k) * p**k * (1.0 - p) ** (m - k) for k in range(kstar + 1))
    )


@dataclass(frozen=True)
class FailureEstimate:
    """Empirical vote-failure frequency with its exact-binomial companion."""

    value: float
    std_error: float
    trials: int
    exact: float


def estimate_vote_failure(
    q: int, alpha: float, p: float, trials: int, stream: RngStream
) -> FailureEstimate:
    """Simulate the correct-vote count Z and the event Z < q/2.

    Honest workers vote correctly i.i.d. with probability p; adversaries
    never do (the strongest-attack abstraction).
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    m = q - byzantine_count_from_fraction(q, alpha)
    rng = stream.generator()
    z = rng.binomial(m, p, size=trials)
    fails = int(np.count_nonzero(z <= _vote_fail_threshold(q)))
    rate = fails / trials
    return FailureEstimate(
        value=rate,
        std_error=math.sqrt(rate * (1.0 - rate) / trials),
        trials=trials,
        exact=exact_vote_failure(q, alpha, p),
    )


def derive_run_seed(master_seed: int, point_index: int, repeat: int) -> int:
    """Deterministic 64-bit seed for one sweep cell."""
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(point_index, repeat))
    lo, hi = seq.generate_state(2, dtype=np.uint32)
    return int(hi) << 32 | int(lo)


@dataclass(frozen=True)
class SweepPoint:
    axis: str
    axis_value: object
    repeat: int
    seed: int
    result: RunResult | None
    error: str | None = None


def _config_with_axis_value(base: RunConfig, axis: str, value: object, seed: int) -> RunConfig:
    fleet = base.fleet
    if axis == "byzantine_count":
        fleet = FleetConfig(
            q=fleet.q,
            byzantine_count=int(value),  # type: ignore[arg-type]
            attack=fleet.attack,
            batch=fleet.batch,
            noise=fleet.noise,
        )
    elif axis == "batch_size":
        fleet = FleetConfig(
            q=fleet.q,
            byzantine_count=fleet.byzantine_count,
            attack=fleet.attack,
            batch=BatchSchedule(mode="constant", size=int(value)),  # type: ignore[arg-type]
            noise=fleet.noise,
        )
    elif axis == "attack":
        fleet = FleetConfig(
            q=fleet.q,
            byzantine_count=fleet.byzantine_count,
            attack=AttackStrategy(value),  # type: ignore[arg-type]
            batch=fleet.batch,
            noise=fleet.noise,
        )
    else:
        raise ValueError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    return RunConfig(
        objective=base.objective,
        fleet=fleet,
        iterations=base.iterations,
        initial_lr=base.initial_lr,
        lr_schedule=base.lr_schedule,
        weight_decay=base.weight_decay,
        master_seed=seed,
        x0=base.x0,
    )


def sweep(
    base: RunConfig, axis: str, values: "list[object]", repeats: int = 1, threads: int = 1
) -> list[SweepPoint]:
    """Run every (value, repeat) cell with a repeat-indexed derived seed.

    Infeasible cells are recorded with their error and the sweep continues.
    Ordering is deterministic: values outer, repeats inner.
    """
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    points: list[SweepPoint] = []
    for idx, value in enumerate(values):
        for rep in range(repeats):
            seed = derive_run_seed(base.master_seed, idx, rep)
            try:
                cfg = _config_with_axis_value(base, axis, value, seed)
                result = run(cfg, threads=threads)
                points.append(SweepPoint(axis, value, rep, seed, result))
            except (InfeasibleError, ValueError) as exc:
                points.append(SweepPoint(axis, value, rep, seed, None, error=str(exc)))
    return points


def frozen_vote_flip_counts(
    obj: Objective,
    x: GradVector,
    noise: NoiseModel,
    n: int,
    q: int,
    b_values: "list[int]",
    attacks: "list[AttackStrategy]",
    steps: int,
    master_seed: int,
) -> dict[tuple[AttackStrategy, int], np.ndarray]:
    """Per-step flipped-coordinate counts at a frozen iterate x.

    Worker estimates are drawn once per step from the same per-worker
    streams a real run would use, then re-aggregated for every requested
    (attack, byzantine_count) pair, so comparisons across attacks and
    adversary counts share identical honest behavior.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    for b in b_values:
        if not 0 <= b < q:
            raise InfeasibleError(f"byzantine count {b} out of range for q = {q}")
    attacks = [AttackStrategy(a) for a in attacks]
    g = true_gradient(obj, x)
    g_sign = np.sign(g.entries)
    nonzero = g_sign != 0

    out = {
        (attack, b): np.zeros(steps, dtype=np.int64) for attack in attacks for b in b_values
    }
    for t in range(steps):
        signs = np.empty((q, x.dim), dtype=np.int64)
        for w in range(q):
            stream = RngStream(master_seed, w, t, 0)
            est = stochastic_gradient(obj, x, noise, n, stream)
            signs[w] = np.sign(est.entries)
        prefix = np.vstack([np.zeros(x.dim, dtype=np.int64), np.cumsum(signs, axis=0)])
        total = prefix[q]
        for b in b_values:
            honest_sum = prefix[q - b]
            adv_own_sum = total - honest_sum
            for attack in attacks:
                if b == 0 or attack is AttackStrategy.NONE:
                    tally = total  # everyone votes their own sign
                elif attack is AttackStrategy.OMNISCIENT_OPTIMAL:
                    tally = honest_sum - b * g_sign
                elif attack is AttackStrategy.BLIND_FLIP:
                    tally = honest_sum - adv_own_sum
                elif attack is AttackStrategy.ADVERSARY_SERVER:
                    tally = honest_sum - b * np.sign(adv_own_sum)
                else:
                    raise AssertionError(f"unhandled attack {attack}")
                flips = np.count_nonzero(nonzero & (np.sign(tally) == -g_sign))
                out[(attack, b)][t] = flips
    return out
