"""
Elementary functions used by the model equations.

Model code calls these instead of :mod:`math` so that the same equations run
on plain floats and on dual numbers.
"""

from __future__ import annotations

import math
from typing import Any, Sequence

from ..utils import is_plain, primitive


@primitive
def exp(x):
    return math.exp(x)


@primitive
def log(x):
    return math.log(x)


@primitive
def sqrt(x):
    return math.sqrt(x)


@primitive
def power(x, y):
    return x**y


def mean(values: Sequence[Any]):
    """
    Arithmetic mean. For plain floats the sum is exactly rounded, and a
    sequence of identical values returns that value unchanged.

    Examples:
        >>> mean([0.1] * 24)
        0.1
        >>> mean([1.0, 2.0, 3.0, 4.0])
        2.5
    """
    n = len(values)
    if all(is_plain(v) for v in values):
        first = values[0]
        if all(v == first for v in values):
            return float(first)
        return math.fsum(values) / n
    total = values[0]
    for v in values[1:]:
        total = total + v
    return total / n
