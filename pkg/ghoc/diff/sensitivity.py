"""
Forward sensitivities of the combined model and of the OCP cost.
"""

from __future__ import annotations

import numpy as np

from ..coupling import flatten, rollout
from ..ocp.cost import cost_expression
from ..ocp.problem import OcpProblem
from ..utils import SolveLogger, event_register
from .jacobian import jacobian, value_and_jacobian


def value_and_gradient(
    U, problem: OcpProblem, *, batch_size: int | None = None, threads: int = 1
) -> tuple[float, np.ndarray]:
    """Cost and ``dJ/dU`` from one batched forward sweep over all controls."""
    SolveLogger().add_evals(gradient=1)
    values, jac = value_and_jacobian(
        lambda u: cost_expression(u, problem),
        np.asarray(U, dtype=float).ravel(),
        batch_size=batch_size,
        threads=threads,
    )
    return float(values[0]), jac[0]


@event_register("gradient_of_cost")
def gradient_of_cost(
    U, problem: OcpProblem, *, batch_size: int | None = None, threads: int = 1
) -> np.ndarray:
    return value_and_gradient(U, problem, batch_size=batch_size, threads=threads)[1]


def final_state_jacobian(U, problem: OcpProblem) -> np.ndarray:
    """``d flatten(x_N) / dU`` through the whole rollout."""

    def final_state(u):
        states = rollout(problem.x_init, problem.controls(u), problem.days, problem.params)
        return list(flatten(states[-1]))

    return jacobian(final_state, np.asarray(U, dtype=float).ravel())
