"""
Box-constrained minimization of the single shooting cost.

``pgbb`` is a projected gradient method with Barzilai-Borwein steps and
Armijo backtracking along the projection arc; ``lbfgsb`` hands the same
cost and gradient to :func:`scipy.optimize.minimize`. Costs of accepted
iterates always come from the float path, gradients from the dual path.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from ..diff import sensitivity
from ..scenario.trajectory import Trajectory
from ..utils import (
    Cache,
    DivergenceError,
    EventGuard,
    NonConvergenceError,
    SolveLogger,
    event_register,
    is_strict_mode,
    log,
    log_do,
)
from .cost import cost, simulate
from .problem import OcpProblem, SolverConfig


def trial_value(value: Callable[[np.ndarray], float], x: np.ndarray) -> float:
    """Cost of a trial point, ``inf`` when the model leaves its physical band."""
    try:
        return value(x)
    except DivergenceError as e:
        log(2, f"[line_search] rejected trial point: {e.message}\n")
        return math.inf


def project(x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """
    Examples:
        >>> project(np.array([-1.0, 0.5, 3.0]), np.zeros(3), np.ones(3)).tolist()
        [0.0, 0.5, 1.0]
    """
    return np.minimum(np.maximum(x, lo), hi)


def projected_gradient_norm(x, g, lo, hi) -> float:
    """``|P(x - g) - x|_inf``; zero exactly at first-order stationary points."""
    return float(np.max(np.abs(project(x - g, lo, hi) - x))) if x.size else 0.0


@dataclass
class BoxResult:
    x: np.ndarray
    f: float
    iterations: int
    converged: bool
    message: str
    cost_history: list[float] = field(default_factory=list)
    pg_history: list[float] = field(default_factory=list)


def minimize_box(
    value_and_grad: Callable[[np.ndarray], tuple[float, np.ndarray]],
    value: Callable[[np.ndarray], float],
    x0: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    cfg: SolverConfig,
) -> BoxResult:
    """
    Projected Barzilai-Borwein descent on ``lo <= x <= hi``.

    ``value`` gives the accepted costs, ``value_and_grad`` only contributes
    its gradient. A trial point on which ``value`` raises
    :class:`DivergenceError` counts as infinitely expensive and the search
    backtracks. The iteration stops when the projected gradient norm falls
    to ``cfg.tol`` times its initial value.
    """
    x = project(np.asarray(x0, dtype=float), lo, hi)
    f = value(x)
    _, g = value_and_grad(x)
    pg0 = projected_gradient_norm(x, g, lo, hi)
    result = BoxResult(x, f, 0, False, "", [f], [pg0])
    if pg0 == 0.0:
        result.converged, result.message = True, "initial point is stationary"
        return result

    step = min(cfg.step_max, max(cfg.step_min, 1.0 / float(np.max(np.abs(g)))))
    for it in range(1, cfg.max_iter + 1):
        slope_ok = False
        alpha = step
        with EventGuard("line_search"):
            for _ in range(cfg.max_backtracks + 1):
                x_new = project(x - alpha * g, lo, hi)
                d = x_new - x
                if not np.any(d):
                    break
                f_new = trial_value(value, x_new)
                if f_new <= f + cfg.armijo * float(g @ d):
                    slope_ok = True
                    break
                alpha *= cfg.backtrack
        if not slope_ok:
            result.message = f"line search failed at iteration {it}"
            log(2, f"[line_search] {result.message}\n")
            break

        _, g_new = value_and_grad(x_new)
        s, y = x_new - x, g_new - g
        sy = float(s @ y)
        step = float(s @ s) / sy if sy > 0 else cfg.step_max
        step = min(cfg.step_max, max(cfg.step_min, step))
        x, f, g = x_new, f_new, g_new

        pg = projected_gradient_norm(x, g, lo, hi)
        result.cost_history.append(f)
        result.pg_history.append(pg)
        result.iterations = it
        log(2, f"[solve] it={it} J={f:.10g} pg={pg:.3e} step={step:.3e}\n")
        if pg <= cfg.tol * pg0:
            result.converged = True
            result.message = "projected gradient below tolerance"
            break
    else:
        result.message = f"reached max_iter={cfg.max_iter}"

    result.x, result.f = x, f
    return result


class ObjectiveCache(Cache):
    """Float cost of one problem keyed by the exact control bytes."""

    def __init__(self, problem: OcpProblem):
        super().__init__(max_entries=256)
        self.problem = problem

    def key_fn(self, U):
        return np.asarray(U, dtype=float).tobytes()

    def value_fn(self, U):
        return cost(U, self.problem)

    def describe_key(self, key) -> str:
        return f"<controls {len(key) // 8}>"


def _minimize_lbfgsb(value_and_grad, value, x0, lo, hi, cfg: SolverConfig) -> BoxResult:
    x0 = project(np.asarray(x0, dtype=float), lo, hi)
    history = [value(x0)]
    accepted = [x0]
    pg_history = []
    last_grad = {}

    def fun(x):
        f = trial_value(value, x)
        if not math.isfinite(f):
            # a wall above the last accepted cost, the line search interpolates back
            return history[-1] + 1.0 + abs(history[-1]), np.zeros_like(x)
        _, g = value_and_grad(x)
        last_grad["x"], last_grad["g"] = x.copy(), g
        return f, g

    def callback(xk):
        history.append(value(xk))
        accepted.append(np.array(xk, dtype=float))
        if "g" in last_grad and np.array_equal(last_grad["x"], xk):
            pg_history.append(projected_gradient_norm(xk, last_grad["g"], lo, hi))
        log(2, f"[solve] it={len(history) - 1} J={history[-1]:.10g}\n")

    res = minimize(
        fun,
        x0,
        jac=True,
        method="L-BFGS-B",
        bounds=list(zip(lo, hi)),
        callback=callback,
        options={"maxiter": cfg.max_iter, "gtol": cfg.tol, "ftol": 1e-15},
    )
    x = project(np.asarray(res.x, dtype=float), lo, hi)
    f = trial_value(value, x)
    if not math.isfinite(f):
        x, f = accepted[-1], history[-1]
    return BoxResult(
        x=x,
        f=f,
        iterations=int(res.nit),
        converged=bool(res.success),
        message=str(res.message),
        cost_history=history,
        pg_history=pg_history,
    )


@dataclass
class OcpSolution:
    U_star: np.ndarray  # (N, 3)
    trajectory: Trajectory
    J_star: float
    iterations: int
    converged: bool
    wall_time: float
    cost_history: list[float]
    pg_history: list[float]
    message: str = ""

    @property
    def economic_yield(self) -> float:
        return -self.J_star


def initial_controls(problem: OcpProblem, cfg: SolverConfig) -> np.ndarray:
    lo, hi = problem.bounds()
    if cfg.init == "lower":
        return lo.copy()
    if cfg.init == "upper":
        return hi.copy()
    if cfg.init == "random":
        return np.random.default_rng(cfg.seed).uniform(lo, hi)
    return (lo + hi) / 2.0


@event_register("solve")
def solve(
    problem: OcpProblem,
    cfg: SolverConfig | None = None,
    U0: np.ndarray | None = None,
    config_hash: str | None = None,
) -> OcpSolution:
    """
    Solve the economic-yield problem by single shooting.

    A run that stops before the tolerance returns the best iterate with
    ``converged=False``, or raises :class:`NonConvergenceError` in strict
    mode.
    """
    cfg = cfg or SolverConfig()
    start = time.perf_counter()
    lo, hi = problem.bounds()
    x0 = initial_controls(problem, cfg) if U0 is None else np.asarray(U0, dtype=float).ravel()
    objective = ObjectiveCache(problem)

    def value_and_grad(U):
        return sensitivity.value_and_gradient(
            U, problem, batch_size=cfg.batch_size, threads=cfg.threads
        )

    log(1, f"[solve] model={problem.model} N={problem.N} method={cfg.method}\n")
    minimizer = minimize_box if cfg.method == "pgbb" else _minimize_lbfgsb
    result = minimizer(value_and_grad, objective, x0, lo, hi, cfg)

    U_star = result.x.reshape(problem.N, -1)
    trajectory = simulate(U_star, problem, config_hash=config_hash)
    J_star = cost(U_star, problem)
    solution = OcpSolution(
        U_star=U_star,
        trajectory=trajectory,
        J_star=J_star,
        iterations=result.iterations,
        converged=result.converged,
        wall_time=time.perf_counter() - start,
        cost_history=result.cost_history,
        pg_history=result.pg_history,
        message=result.message,
    )
    SolveLogger().add_solve(
        model=problem.model,
        iterations=solution.iterations,
        J_star=solution.J_star,
        converged=solution.converged,
        wall_time=round(solution.wall_time, 3),
    )
    log_do(1, SolveLogger().print_info)
    if not solution.converged:
        log(1, f"[solve] not converged: {solution.message}\n")
        if is_strict_mode():
            raise NonConvergenceError(
                f"solver stopped without convergence: {solution.message}",
                iterations=solution.iterations,
                J=solution.J_star,
            )
    return solution
