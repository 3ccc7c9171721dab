"""
Forward-mode dual numbers.

A :class:`DualNumber` carries a value and the vector of its derivatives along
a fixed set of seed directions. Arithmetic operators implement the chain rule
directly; the elementary functions of :mod:`ghoc.diff.ops` and the smoothing
primitives get their rules registered on the :class:`Dispatcher` at import.

Anything that would silently drop the derivative part (``float()``,
``math.*``, ordering comparisons, ``abs``) raises :class:`DifferentiationError`
naming the operation, so model code stays branch free.
"""

from __future__ import annotations

import math
from typing import Any

import numpy as np

from .. import smoothing
from ..utils import DifferentiationError, Dispatcher
from . import ops


def _unsupported(name: str):
    def method(self, *args, **kwargs):
        raise DifferentiationError(
            f"unsupported primitive '{name}' on a DualNumber; the models must stay branch free and use ghoc.diff.ops / ghoc.smoothing",
            primitive=name,
        )

    method.__name__ = name
    return method


class DualNumber:
    """
    Examples:
        >>> x = DualNumber.seed(2.0, 0, 2)
        >>> y = DualNumber.seed(3.0, 1, 2)
        >>> z = x * y + x
        >>> z.value
        8.0
        >>> z.derivs.tolist()
        [4.0, 2.0]
    """

    __slots__ = ("value", "derivs")

    def __init__(self, value: float, derivs: np.ndarray):
        self.value = value
        self.derivs = derivs

    @classmethod
    def seed(cls, value: float, index: int, size: int) -> DualNumber:
        derivs = np.zeros(size)
        derivs[index] = 1.0
        return cls(float(value), derivs)

    @classmethod
    def constant(cls, value: float, size: int) -> DualNumber:
        return cls(float(value), np.zeros(size))

    # arithmetic

    def __add__(self, other):
        if isinstance(other, DualNumber):
            return DualNumber(self.value + other.value, self.derivs + other.derivs)
        if isinstance(other, (float, int)):
            return DualNumber(self.value + other, self.derivs)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, DualNumber):
            return DualNumber(self.value - other.value, self.derivs - other.derivs)
        if isinstance(other, (float, int)):
            return DualNumber(self.value - other, self.derivs)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (float, int)):
            return DualNumber(other - self.value, -self.derivs)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, DualNumber):
            return DualNumber(
                self.value * other.value,
                self.derivs * other.value + other.derivs * self.value,
            )
        if isinstance(other, (float, int)):
            return DualNumber(self.value * other, self.derivs * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, DualNumber):
            value = self.value / other.value
            return DualNumber(
                value, (self.derivs - other.derivs * value) / other.value
            )
        if isinstance(other, (float, int)):
            return DualNumber(self.value / other, self.derivs / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (float, int)):
            value = other / self.value
            return DualNumber(value, self.derivs * (-value / self.value))
        return NotImplemented

    def __pow__(self, other):
        if isinstance(other, (float, int)):
            value = self.value**other
            return DualNumber(
                value, self.derivs * (other * self.value ** (other - 1))
            )
        if isinstance(other, DualNumber):
            return ops.exp(other * ops.log(self))
        return NotImplemented

    def __rpow__(self, other):
        if isinstance(other, (float, int)):
            value = other**self.value
            return DualNumber(value, self.derivs * (value * math.log(other)))
        return NotImplemented

    def __neg__(self):
        return DualNumber(-self.value, -self.derivs)

    def __pos__(self):
        return self

    # numpy object arrays call these by ufunc name
    def exp(self):
        return ops.exp(self)

    def log(self):
        return ops.log(self)

    def sqrt(self):
        return ops.sqrt(self)

    def __array_ufunc__(self, ufunc, method, *inputs, **kwargs):
        handler = _UFUNCS.get(ufunc.__name__) if method == "__call__" else None
        if handler is None or kwargs:
            raise DifferentiationError(
                f"unsupported primitive 'numpy.{ufunc.__name__}' on a DualNumber",
                primitive=f"numpy.{ufunc.__name__}",
            )
        return handler(*(_unwrap_numpy(x) for x in inputs))

    __float__ = _unsupported("float")
    __int__ = _unsupported("int")
    __index__ = _unsupported("index")
    __bool__ = _unsupported("bool")
    __abs__ = _unsupported("abs")
    __lt__ = _unsupported("<")
    __le__ = _unsupported("<=")
    __gt__ = _unsupported(">")
    __ge__ = _unsupported(">=")
    __round__ = _unsupported("round")

    def __repr__(self):
        return f"DualNumber({self.value!r}, {self.derivs!r})"


def _unwrap_numpy(x):
    if isinstance(x, np.generic):
        return x.item()
    return x


_UFUNCS = {
    "add": lambda a, b: a + b,
    "subtract": lambda a, b: a - b,
    "multiply": lambda a, b: a * b,
    "true_divide": lambda a, b: a / b,
    "divide": lambda a, b: a / b,
    "negative": lambda a: -a,
    "power": lambda a, b: a**b,
    "exp": lambda a: ops.exp(a),
    "log": lambda a: ops.log(a),
    "sqrt": lambda a: ops.sqrt(a),
}


def value_of(x: Any) -> float:
    """Plain value of a float or a dual number."""
    if isinstance(x, DualNumber):
        return x.value
    return float(x)


def _require_plain(name: str, *params: Any):
    for p in params:
        if isinstance(p, DualNumber):
            raise DifferentiationError(
                f"derivatives with respect to the smoothing parameter of '{name}' are not supported",
                primitive=name,
            )


# elementary functions


@Dispatcher.register_decorator(ops.exp, DualNumber)
def _exp(x: DualNumber):
    value = math.exp(x.value)
    return DualNumber(value, x.derivs * value)


@Dispatcher.register_decorator(ops.log, DualNumber)
def _log(x: DualNumber):
    return DualNumber(math.log(x.value), x.derivs / x.value)


@Dispatcher.register_decorator(ops.sqrt, DualNumber)
def _sqrt(x: DualNumber):
    value = math.sqrt(x.value)
    return DualNumber(value, x.derivs * (0.5 / value))


@Dispatcher.register_decorator(ops.power, DualNumber)
def _power(x, y):
    if isinstance(y, DualNumber):
        if isinstance(x, DualNumber):
            return x**y
        return float(x) ** y
    return x ** float(y)


# smoothing primitives


@Dispatcher.register_decorator(smoothing.soft_heaviside, DualNumber)
def _soft_heaviside(x: DualNumber, epsilon):
    _require_plain("soft_heaviside", epsilon)
    value = smoothing.soft_heaviside.raw(x.value, epsilon)
    grad = smoothing.soft_heaviside_grad(x.value, epsilon)
    return DualNumber(value, x.derivs * grad)


@Dispatcher.register_decorator(smoothing.soft_abs, DualNumber)
def _soft_abs(x: DualNumber, mu):
    _require_plain("soft_abs", mu)
    value = smoothing.soft_abs.raw(x.value, mu)
    return DualNumber(value, x.derivs * (x.value / value))


@Dispatcher.register_decorator(smoothing.soft_max, DualNumber)
def _soft_max(a, b, mu):
    _require_plain("soft_max", mu)
    a_value, b_value = value_of(a), value_of(b)
    value = smoothing.soft_max.raw(a_value, b_value, mu)
    da, db = smoothing.soft_max_grad(a_value, b_value, mu)
    derivs = None
    if isinstance(a, DualNumber):
        derivs = a.derivs * da
    if isinstance(b, DualNumber):
        derivs = b.derivs * db if derivs is None else derivs + b.derivs * db
    return DualNumber(value, derivs)
