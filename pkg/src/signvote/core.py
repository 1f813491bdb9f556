"""Sign algebra, majority-vote aggregation, and reproducible random streams.

All vector types own a read-only numpy array. Random streams are
counter-based: a stream is fully determined by the tuple
(master_seed, worker_id, step, substream), so draws are reproducible
regardless of execution order or thread count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SignVector",
    "GradVector",
    "VoteTally",
    "RngStream",
    "sign_of",
    "majority_vote",
    "derive_stream",
]

_MAX_SEED = 2**64


@dataclass(frozen=True, eq=False)
class GradVector:
    """Dense real-valued vector (a true or estimated gradient)."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=np.float64, copy=True).reshape(-1)
        if arr.size == 0:
            raise ValueError("GradVector must have at least one entry")
        if not np.isfinite(arr).all():
            raise ValueError("GradVector entries must be finite (no NaN/Inf)")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    def tolist(self) -> list[float]:
        return self.entries.tolist()


@dataclass(frozen=True, eq=False)
class SignVector:
    """Per-coordinate values in {-1, 0, +1}; what workers transmit."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.entries, copy=True).reshape(-1)
        if arr.size == 0:
            raise ValueError("SignVector must have at least one entry")
        as_int = arr.astype(np.int8)
        if not np.array_equal(as_int, arr):
            raise ValueError("SignVector entries must be integers in {-1, 0, +1}")
        if np.abs(as_int).max() > 1:
            raise ValueError("SignVector entries must lie in {-1, 0, +1}")
        as_int.setflags(write=False)
        object.__setattr__(self, "entries", as_int)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    def negated(self) -> "SignVector":
        return SignVector(-self.entries)

    def tolist(self) -> list[int]:
        return self.entries.tolist()


@dataclass(frozen=True, eq=False)
class VoteTally:
    """Signed per-coordinate vote counts over `voters` workers."""

    sums: np.ndarray
    voters: int

    def __post_init__(self) -> None:
        arr = np.array(self.sums, dtype=np.int64, copy=True).reshape(-1)
        if self.voters < 1:
            raise ValueError("VoteTally needs at least one voter")
        if arr.size and int(np.abs(arr).max()) > self.voters:
            raise ValueError("tally magnitude cannot exceed the voter count")
        arr.setflags(write=False)
        object.__setattr__(self, "sums", arr)

    @property
    def dim(self) -> int:
        return int(self.sums.shape[0])


@dataclass(frozen=True)
class RngStream:
    """Address of one deterministic random stream.

    Streams with identical coordinates replay identically; streams that
    differ in any coordinate are statistically independent.
    """

    master_seed: int
    worker_id: int = 0
    step: int = 0
    substream: int = 0

    def __post_init__(self) -> None:
        if not 0 <= int(self.master_seed) < _MAX_SEED:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        for name in ("worker_id", "step", "substream"):
            if int(getattr(self, name)) < 0:
                raise ValueError(f"{name} must be non-negative")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(
            entropy=int(self.master_seed),
            spawn_key=(int(self.worker_id), int(self.step), int(self.substream)),
        )
        return np.random.Generator(np.random.Philox(seq))


def derive_stream(
    master_seed: int, worker_id: int = 0, step: int = 0, substream: int = 0
) -> RngStream:
    """Derive the stream keyed by (master_seed, worker_id, step, substream)."""
    return RngStream(master_seed, worker_id, step, substream)


def sign_of(v: GradVector) -> SignVector:
    """Coordinate-wise sign with sign(0) = 0."""
    return SignVector(np.sign(v.entries).astype(np.int8))


def majority_vote(votes: "list[SignVector] | tuple[SignVector, ...]") -> tuple[VoteTally, SignVector]:
    """Sum the transmitted sign vectors and take the sign of the total.

    Ties (a zero column sum) resolve to 0.
    """
    votes = list(votes)
    if not votes:
        raise ValueError("majority_vote needs at least one voter")
    dim = votes[0].dim
    for v in votes[1:]:
        if v.dim != dim:
            raise ValueError(f"vote dimension mismatch: {v.dim} != {dim}")
    stacked = np.stack([v.entries for v in votes]).astype(np.int64)
    sums = stacked.sum(axis=0)
    tally = VoteTally(sums, voters=len(votes))
    return tally, SignVector(np.sign(sums).astype(np.int8))
