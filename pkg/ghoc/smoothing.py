"""
Differentiable stand-ins for the nonsmooth primitives of the crop and
greenhouse dynamics.

``soft_heaviside``, ``soft_abs`` and ``soft_max`` are dispatchable primitives:
with plain floats they evaluate the closed forms below, with dual numbers the
rules registered in :mod:`ghoc.diff.dual` apply. ``soft_min`` and
``soft_clip`` are compositions and need no rules of their own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping

from .utils import ParameterError, primitive

# e^(-eps*x) is evaluated with its exponent clamped to this magnitude
EXP_CLAMP = 500.0

DEFAULT_EPSILON = 100.0
DEFAULT_MU = 1e-6


def _check_positive(name: str, value: float):
    if not value > 0:
        raise ParameterError(f"smoothing parameter {name} must be > 0, got {value!r}")


@dataclass(frozen=True)
class SmoothingParams:
    epsilon: float = DEFAULT_EPSILON
    mu: float = DEFAULT_MU

    def __post_init__(self):
        _check_positive("epsilon", self.epsilon)
        _check_positive("mu", self.mu)

    @classmethod
    def from_config(cls, section: Mapping[str, Any]) -> SmoothingParams:
        return cls(
            epsilon=float(section.get("epsilon", DEFAULT_EPSILON)),
            mu=float(section.get("mu", DEFAULT_MU)),
        )


@primitive
def soft_heaviside(x, epsilon):
    """
    Logistic step ``1 / (1 + e^(-epsilon * x))``.

    Examples:
        >>> soft_heaviside(0.0, 100.0)
        0.5
        >>> round(soft_heaviside(0.1, 100.0) + soft_heaviside(-0.1, 100.0), 12)
        1.0
    """
    _check_positive("epsilon", epsilon)
    z = -epsilon * x
    if z > EXP_CLAMP:
        z = EXP_CLAMP
    elif z < -EXP_CLAMP:
        z = -EXP_CLAMP
    return 1.0 / (1.0 + math.exp(z))


@primitive
def soft_abs(x, mu):
    """
    ``sqrt(x^2 + mu)``, never below ``sqrt(mu)``.

    Examples:
        >>> soft_abs(0.0, 1e-6)
        0.001
        >>> soft_abs(-3.0, 1e-6) == soft_abs(3.0, 1e-6)
        True
    """
    _check_positive("mu", mu)
    return math.sqrt(x * x + mu)


@primitive
def soft_max(a, b, mu):
    """
    ``(a + b + soft_abs(a - b, mu)) / 2``. Overestimates ``max(a, b)`` by at
    most ``sqrt(mu) / 2``, attained at ``a == b``.

    Examples:
        >>> soft_max(2.0, 2.0, 1e-6)
        2.0005
        >>> soft_max(5.0, 1.0, 1e-6) == soft_max(1.0, 5.0, 1e-6)
        True
    """
    return (a + b + soft_abs.raw(a - b, mu)) / 2.0


def soft_min(a, b, mu):
    return -soft_max(-a, -b, mu)


def soft_clip(x, lower, upper, mu):
    """Smoothed ``min(max(x, lower), upper)`` whose result never drops below
    ``lower``; the upper side may undershoot ``upper`` by ``sqrt(mu) / 2``."""
    return soft_max(soft_min(x, upper, mu), lower, mu)


def soft_heaviside_grad(x: float, epsilon: float) -> float:
    # from the clamped form, so large |epsilon * x| gives 0 instead of nan
    h = soft_heaviside.raw(x, epsilon)
    return epsilon * h * (1.0 - h)


def soft_abs_grad(x: float, mu: float) -> float:
    return x / soft_abs.raw(x, mu)


def soft_max_grad(a: float, b: float, mu: float) -> tuple[float, float]:
    s = soft_abs_grad(a - b, mu)
    return 0.5 * (1.0 + s), 0.5 * (1.0 - s)
