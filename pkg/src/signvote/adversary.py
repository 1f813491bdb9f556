"""Adversarial vote generation.

Three attacks are modeled, ordered by the information they consume:

- omniscient_optimal: every adversary transmits the negated sign of the
  true gradient. This is the damage-maximizing strategy available under
  sign compression, since magnitudes are filtered out and the only lever
  is how many wrong signs enter the vote.
- adversary_server: adversaries first majority-vote among their own noisy
  estimates to reconstruct the likely true sign, then all transmit its
  negation.
- blind_flip: each adversary independently negates the sign of its own
  noisy estimate; no coordination, no knowledge of the true gradient.

Strategies see only the current step's frozen state (true gradient, honest
votes, own estimates), never future iterates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .core import GradVector, SignVector, majority_vote, sign_of

__all__ = [
    "AttackStrategy",
    "AdversaryKnowledge",
    "KnowledgeError",
    "omniscient_optimal_votes",
    "blind_flip_votes",
    "adversary_server_votes",
    "attack_votes",
    "needs_own_estimates",
]


class KnowledgeError(ValueError):
    """An attack was asked to run without the information it requires."""


class AttackStrategy(str, Enum):
    NONE = "none"
    OMNISCIENT_OPTIMAL = "omniscient_optimal"
    BLIND_FLIP = "blind_flip"
    ADVERSARY_SERVER = "adversary_server"


@dataclass(frozen=True)
class AdversaryKnowledge:
    """Everything adversaries may observe at the current step.

    Honest votes are exposed because an omniscient adversary sees them,
    although none of the modeled strategies consumes them.
    """

    true_gradient: GradVector | None = None
    honest_votes: tuple[SignVector, ...] = field(default_factory=tuple)
    own_estimates: tuple[GradVector, ...] = field(default_factory=tuple)


def omniscient_optimal_votes(knowledge: AdversaryKnowledge, b: int) -> list[SignVector]:
    """b identical copies of the negated true-gradient sign.

    Collusion makes all adversarial votes identical; on coordinates where
    the true gradient is exactly zero the transmitted entry is 0.
    """
    if b < 1:
        raise ValueError("adversary count b must be at least 1")
    if knowledge.true_gradient is None:
        raise KnowledgeError("omniscient attack requires the true gradient")
    vote = sign_of(knowledge.true_gradient).negated()
    return [vote] * b


def blind_flip_votes(knowledge: AdversaryKnowledge, b: int) -> list[SignVector]:
    """Each adversary negates the sign of its own estimate, independently."""
    if b < 1:
        raise ValueError("adversary count b must be at least 1")
    if len(knowledge.own_estimates) < b:
        raise ValueError(
            f"blind flip needs {b} own estimates, got {len(knowledge.own_estimates)}"
        )
    return [sign_of(est).negated() for est in knowledge.own_estimates[:b]]


def adversary_server_votes(knowledge: AdversaryKnowledge, b: int) -> list[SignVector]:
    """Majority-vote the adversaries' own signs, then all transmit the negation."""
    if b < 1:
        raise ValueError("adversary count b must be at least 1")
    if len(knowledge.own_estimates) < b:
        raise ValueError(
            f"adversary server needs {b} own estimates, got {len(knowledge.own_estimates)}"
        )
    _, estimate = majority_vote([sign_of(est) for est in knowledge.own_estimates[:b]])
    return [estimate.negated()] * b


def attack_votes(
    strategy: AttackStrategy, knowledge: AdversaryKnowledge, b: int
) -> list[SignVector]:
    """Dispatch to the configured strategy; NONE yields honest votes.

    Under NONE the nominal adversaries follow the protocol, voting the
    sign of their own estimates.
    """
    strategy = AttackStrategy(strategy)
    if b == 0:
        return []
    if strategy is AttackStrategy.NONE:
        if len(knowledge.own_estimates) < b:
            raise ValueError(f"need {b} own estimates for protocol-following workers")
        return [sign_of(est) for est in knowledge.own_estimates[:b]]
    if strategy is AttackStrategy.OMNISCIENT_OPTIMAL:
        return omniscient_optimal_votes(knowledge, b)
    if strategy is AttackStrategy.BLIND_FLIP:
        return blind_flip_votes(knowledge, b)
    if strategy is AttackStrategy.ADVERSARY_SERVER:
        return adversary_server_votes(knowledge, b)
    raise AssertionError(f"unhandled attack strategy {strategy}")


def needs_own_estimates(strategy: AttackStrategy) -> bool:
    """Whether the strategy consumes the adversaries' own gradient draws."""
    return AttackStrategy(strategy) in (
        AttackStrategy.NONE,
        AttackStrategy.BLIND_FLIP,
        AttackStrategy.ADVERSARY_SERVER,
    )
