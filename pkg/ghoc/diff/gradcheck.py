"""
Finite-difference checks of the forward-mode derivatives.

``smoothing_check`` compares the dual-number rules of the smoothing
primitives with a five point stencil; ``combined_check`` compares the
gradient of the OCP cost with central differences of the float cost.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from ..ocp.cost import cost
from ..ocp.problem import CostWeights, OcpProblem
from ..smoothing import SmoothingParams, soft_abs, soft_heaviside, soft_max
from ..utils import event_register, log
from .dual import DualNumber
from .sensitivity import value_and_gradient

SMOOTHING_THRESHOLD = 1e-8
COMBINED_THRESHOLD = 1e-4


@dataclass
class GradcheckReport:
    name: str
    max_rel_error: float
    threshold: float
    n_checked: int
    gradient_norm: float  # inf-norm of the analytic gradient
    worst: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_rel_error <= self.threshold

    def to_dict(self) -> dict:
        payload = asdict(self)
        payload["passed"] = self.passed
        return payload


def five_point(f: Callable[[float], float], x: float, h: float) -> float:
    """
    Examples:
        >>> round(five_point(lambda t: t**3, 2.0, 1e-3), 9)
        12.0
    """
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


def _relative(a: float, f: float) -> float:
    return abs(a - f) / max(1.0, abs(a), abs(f))


def smoothing_check(
    params: SmoothingParams | None = None,
    n_points: int = 200,
    seed: int = 0,
    threshold: float = SMOOTHING_THRESHOLD,
) -> GradcheckReport:
    """
    Dual derivatives of ``soft_heaviside``, ``soft_abs`` and both arguments
    of ``soft_max`` against five point differences at random points around
    the kink, where the primitives curve the most.
    """
    params = params or SmoothingParams()
    eps, mu = params.epsilon, params.mu
    rng = np.random.default_rng(seed)

    def dual_slope(fn, x):
        return float(fn(DualNumber.seed(x, 0, 1)).derivs[0])

    cases = [
        ("soft_heaviside", lambda x: soft_heaviside(x, eps), 1.0 / eps, 0.05),
        ("soft_abs", lambda x: soft_abs(x, mu), np.sqrt(mu), 1.0),
    ]
    worst = {"primitive": None, "x": None, "rel_error": 0.0}
    largest = 0.0
    n = 0
    for name, fn, scale, width in cases:
        h = min(1e-4, 1e-3 * scale)
        for x in rng.uniform(-width, width, n_points):
            a = dual_slope(fn, float(x))
            rel = _relative(a, five_point(fn, float(x), h))
            largest, n = max(largest, abs(a)), n + 1
            if rel > worst["rel_error"]:
                worst = {"primitive": name, "x": float(x), "rel_error": rel}

    h = min(1e-4, 1e-3 * np.sqrt(mu))
    for a_val, b_val in rng.uniform(-1.0, 1.0, (n_points, 2)):
        for index in (0, 1):
            other = float(b_val) if index == 0 else float(a_val)
            point = float(a_val) if index == 0 else float(b_val)

            def fn(x, index=index, other=other):
                return soft_max(x, other, mu) if index == 0 else soft_max(other, x, mu)

            a = dual_slope(fn, point)
            rel = _relative(a, five_point(fn, point, h))
            largest, n = max(largest, abs(a)), n + 1
            if rel > worst["rel_error"]:
                worst = {"primitive": f"soft_max[arg {index}]", "x": point, "rel_error": rel}

    report = GradcheckReport("smoothing", worst["rel_error"], threshold, n, largest, worst)
    log(1, f"[gradcheck] smoothing max_rel_error={report.max_rel_error:.3e}\n")
    return report


def interior_point(problem: OcpProblem, seed: int = 0, margin: float = 0.1) -> np.ndarray:
    """Random controls at least ``margin`` box widths away from every bound."""
    lo, hi = problem.bounds()
    width = hi - lo
    return np.random.default_rng(seed).uniform(lo + margin * width, hi - margin * width)


@event_register("gradcheck")
def combined_check(
    problem: OcpProblem,
    U: np.ndarray | None = None,
    seed: int = 0,
    h_rel: float = 1e-6,
    threshold: float = COMBINED_THRESHOLD,
    batch_size: int | None = None,
    threads: int = 1,
) -> GradcheckReport:
    """
    ``dJ/dU`` from the dual sweep against central differences of the float
    cost, component by component. Components are compared relative to the
    larger of their two values, floored at ``1e-4`` times the largest
    gradient entry so that vanishing components do not divide by zero.
    """
    U = interior_point(problem, seed) if U is None else np.asarray(U, dtype=float).ravel()
    lo, hi = problem.bounds()
    _, grad = value_and_gradient(U, problem, batch_size=batch_size, threads=threads)
    g_max = float(np.max(np.abs(grad))) if grad.size else 0.0
    floor = max(1e-4 * g_max, np.finfo(float).tiny)

    worst = {"index": None, "analytic": 0.0, "finite_difference": 0.0, "rel_error": 0.0}
    for k in range(U.size):
        h = h_rel * (hi[k] - lo[k])
        up, down = U.copy(), U.copy()
        up[k] += h
        down[k] -= h
        fd = (cost(up, problem) - cost(down, problem)) / (2.0 * h)
        rel = abs(grad[k] - fd) / max(abs(grad[k]), abs(fd), floor)
        if rel > worst["rel_error"]:
            worst = {
                "index": k,
                "analytic": float(grad[k]),
                "finite_difference": float(fd),
                "rel_error": float(rel),
            }
    report = GradcheckReport(
        f"combined[{problem.model}, N={problem.N}]",
        worst["rel_error"],
        threshold,
        int(U.size),
        g_max,
        worst,
    )
    log(1, f"[gradcheck] {report.name} max_rel_error={report.max_rel_error:.3e} |g|={g_max:.3e}\n")
    return report


def zero_weights_check(problem: OcpProblem, seed: int = 0) -> GradcheckReport:
    """With ``r = 0`` and ``q = 0`` on the first day only, the gradient vanishes."""
    trivial = OcpProblem(
        N=1,
        x_init=problem.x_init,
        weights=CostWeights(np.zeros_like(problem.weights.r), np.zeros_like(problem.weights.q)),
        disturbances=problem.disturbances[:1],
        params=problem.params,
        economics=problem.economics,
    )
    _, grad = value_and_gradient(interior_point(trivial, seed), trivial)
    g_max = float(np.max(np.abs(grad)))
    return GradcheckReport(f"zero_weights[{problem.model}]", g_max, 0.0, int(grad.size), g_max)
