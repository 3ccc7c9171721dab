from .dual import DualNumber, value_of
from .jacobian import jacobian, jvp, value_and_jacobian
from .ops import exp, log, mean, power, sqrt

__all__ = [
    "DualNumber",
    "value_of",
    "jacobian",
    "jvp",
    "value_and_jacobian",
    "exp",
    "log",
    "sqrt",
    "power",
    "mean",
]
