"""Objective functions and stochastic gradient oracles.

The built-in objective is the d-dimensional quadratic f(x) = 0.5 * <x, x>,
whose gradient is x itself. Gradient estimates add zero-mean noise from a
unimodal, symmetric family; a batch of size n averages n independent draws,
so the estimate's per-coordinate deviation shrinks as sigma / sqrt(n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import GradVector, RngStream

__all__ = [
    "ObjectiveKind",
    "Objective",
    "NoiseFamily",
    "NoiseModel",
    "BatchSchedule",
    "true_gradient",
    "stochastic_gradient",
    "snr",
]


class ObjectiveKind(str, Enum):
    QUADRATIC = "quadratic"


class NoiseFamily(str, Enum):
    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"
    LAPLACE = "laplace"


@dataclass(frozen=True)
class Objective:
    """An analytic objective; only the quadratic is built in."""

    kind: ObjectiveKind = ObjectiveKind.QUADRATIC
    dim: int = 1000

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ObjectiveKind(self.kind))
        if self.dim < 1:
            raise ValueError("objective dimension must be positive")

    @property
    def smoothness_l1(self) -> float:
        # per-coordinate curvature is 1 for the quadratic, so the l1 total is d
        return float(self.dim)

    @property
    def optimum_value(self) -> float:
        return 0.0

    def value(self, x: GradVector) -> float:
        self._check_dim(x)
        return float(0.5 * np.dot(x.entries, x.entries))

    def _check_dim(self, x: GradVector) -> None:
        if x.dim != self.dim:
            raise ValueError(f"point dimension {x.dim} != objective dimension {self.dim}")


@dataclass(frozen=True)
class NoiseModel:
    """Zero-mean, unimodal, symmetric per-coordinate noise.

    `sigma` is the standard deviation of a single sample; all offered
    families are parameterized so one draw has variance sigma**2.
    """

    family: NoiseFamily = NoiseFamily.GAUSSIAN
    sigma: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", NoiseFamily(self.family))
        if not (self.sigma >= 0.0 and math.isfinite(self.sigma)):
            raise ValueError("sigma must be a finite non-negative real")

    def batch_mean_noise(self, n: int, size: int, rng: np.random.Generator) -> np.ndarray:
        """Noise of a size-`size` estimate built from an n-sample batch mean."""
        if n < 1:
            raise ValueError("batch size must be at least 1")
        if self.sigma == 0.0:
            return np.zeros(size)
        if self.family is NoiseFamily.GAUSSIAN:
            # the mean of n gaussians is gaussian; sample it directly
            return rng.standard_normal(size) * (self.sigma / math.sqrt(n))
        if self.family is NoiseFamily.UNIFORM:
            half_width = self.sigma * math.sqrt(3.0)
            return rng.uniform(-half_width, half_width, size=(n, size)).mean(axis=0)
        if self.family is NoiseFamily.LAPLACE:
            scale = self.sigma / math.sqrt(2.0)
            return rng.laplace(0.0, scale, size=(n, size)).mean(axis=0)
        raise AssertionError(f"unhandled noise family {self.family}")


@dataclass(frozen=True)
class BatchSchedule:
    """Per-step mini-batch sizes: a constant, or the iteration counter."""

    mode: str = "constant"
    size: int = 1

    def __post_init__(self) -> None:
        if self.mode not in ("constant", "iteration_counter"):
            raise ValueError(f"unknown batch schedule mode {self.mode!r}")
        if self.mode == "constant" and self.size < 1:
            raise ValueError("constant batch size must be positive")

    def size_at(self, t: int) -> int:
        """Batch size at 1-indexed step t."""
        if self.mode == "constant":
            return self.size
        return max(1, t)


def true_gradient(obj: Objective, x: GradVector) -> GradVector:
    """Exact analytic gradient; for the quadratic this is x itself."""
    obj._check_dim(x)
    return GradVector(x.entries)


def stochastic_gradient(
    obj: Objective, x: GradVector, noise: NoiseModel, n: int, stream: RngStream
) -> GradVector:
    """Unbiased estimate: true gradient plus the mean of n noise draws."""
    if n < 1:
        raise ValueError("batch size n must be at least 1")
    g = true_gradient(obj, x)
    eps = noise.batch_mean_noise(n, g.dim, stream.generator())
    return GradVector(g.entries + eps)


def snr(g_i: float, sigma: float, n: int = 1) -> float:
    """Signal-to-noise ratio of one coordinate of an n-sample batch mean."""
    if n < 1:
        raise ValueError("batch size n must be at least 1")
    if sigma == 0.0:
        raise ZeroDivisionError("sigma = 0 has infinite SNR; handle separately")
    if sigma < 0.0:
        raise ValueError("sigma must be non-negative")
    return abs(g_i) * math.sqrt(n) / sigma
