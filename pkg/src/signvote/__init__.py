"""signvote: sign-compressed majority-vote SGD under adversarial workers.

A deterministic simulator for the sign-vote protocol (workers transmit
only coordinate signs; the server broadcasts the majority sign), pluggable
attack strategies up to the damage-maximizing omniscient one, closed-form
failure bounds, and Monte Carlo machinery that verifies each bound.
"""

__version__ = "0.1.0"

from .adversary import (
    AdversaryKnowledge,
    AttackStrategy,
    KnowledgeError,
    adversary_server_votes,
    attack_votes,
    blind_flip_votes,
    omniscient_optimal_votes,
)
from .bounds import (
    BoundInputs,
    BoundReport,
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
from .core import (
    GradVector,
    RngStream,
    SignVector,
    VoteTally,
    derive_stream,
    majority_vote,
    sign_of,
)
from .oracle import (
    BatchSchedule,
    NoiseFamily,
    NoiseModel,
    Objective,
    ObjectiveKind,
    snr,
    stochastic_gradient,
    true_gradient,
)
from .sim import (
    FleetConfig,
    RunConfig,
    RunResult,
    StepRecord,
    SweepPoint,
    byzantine_count_from_fraction,
    estimate_p,
    estimate_vote_failure,
    exact_vote_failure,
    frozen_vote_flip_counts,
    run,
    sweep,
)

__all__ = [
    "__version__",
    "AdversaryKnowledge",
    "AttackStrategy",
    "KnowledgeError",
    "adversary_server_votes",
    "attack_votes",
    "blind_flip_votes",
    "omniscient_optimal_votes",
    "BoundInputs",
    "BoundReport",
    "InfeasibleError",
    "RateForm",
    "alpha_threshold",
    "compute_report",
    "convergence_rate_rhs",
    "piecewise_wrong_sign_bound",
    "ratio_bound_holds",
    "tolerable_byzantine_count",
    "verify_bound_cases",
    "vote_failure_bound",
    "vote_failure_bound_snr",
    "wrong_sign_bound",
    "GradVector",
    "RngStream",
    "SignVector",
    "VoteTally",
    "derive_stream",
    "majority_vote",
    "sign_of",
    "BatchSchedule",
    "NoiseFamily",
    "NoiseModel",
    "Objective",
    "ObjectiveKind",
    "snr",
    "stochastic_gradient",
    "true_gradient",
    "FleetConfig",
    "RunConfig",
    "RunResult",
    "StepRecord",
    "SweepPoint",
    "byzantine_count_from_fraction",
    "estimate_p",
    "estimate_vote_failure",
    "exact_vote_failure",
    "frozen_vote_flip_counts",
    "run",
    "sweep",
]
