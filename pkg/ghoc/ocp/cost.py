"""
Single shooting cost ``J(U) = sum_i r . u_i - q . crop_N``.

The same expression runs on floats (accepted costs, reports) and on dual
numbers (gradients, see :mod:`ghoc.diff.sensitivity`).
"""

from __future__ import annotations

import math
from typing import Any, Sequence

import numpy as np

from ..coupling import CombinedState, rollout
from ..models.greenhouse import GhControl
from ..models.registry import get_crop_model
from ..scenario.trajectory import Trajectory
from ..utils import SolveLogger, event_register, is_plain, log
from .problem import CostWeights, OcpProblem


def _sum(values: Sequence[Any]):
    if all(is_plain(v) for v in values):
        return math.fsum(values)
    total = values[0]
    for v in values[1:]:
        total = total + v
    return total


def stage_cost(controls: Sequence[GhControl], r: np.ndarray):
    """
    ``r . sum_i u_i``: the summed daily actuation cost.

    Examples:
        >>> U = [GhControl(0.2, 1.0, 0.4)] * 3
        >>> round(stage_cost(U, np.array([1.0, 0.0, 0.5])), 12)
        1.2
    """
    if not controls:
        return 0.0
    columns = list(zip(*controls))
    terms = [
        float(r_k) * _sum(list(column))
        for r_k, column in zip(r, columns)
        if r_k != 0.0
    ]
    return _sum(terms) if terms else 0.0


def daily_stage_costs(controls: Sequence[GhControl], r: np.ndarray) -> np.ndarray:
    return np.array(
        [math.fsum(float(r_k) * float(u_k) for r_k, u_k in zip(r, u)) for u in controls]
    )


def terminal_value(crop, q: np.ndarray):
    """Euro value of the crop state at the horizon, ``q . crop_N``."""
    terms = [float(q_j) * x_j for q_j, x_j in zip(q, crop) if q_j != 0.0]
    return _sum(terms) if terms else 0.0


def cost_of_states(states: Sequence[CombinedState], controls, weights: CostWeights):
    return stage_cost(controls, weights.r) - terminal_value(states[-1].crop, weights.q)


def cost_expression(U, problem: OcpProblem):
    """The cost as an expression in ``U``; ``U`` may hold dual numbers."""
    controls = problem.controls(U)
    states = rollout(problem.x_init, controls, problem.days, problem.params)
    return cost_of_states(states, controls, problem.weights)


@event_register("cost")
def cost(U, problem: OcpProblem) -> float:
    SolveLogger().add_evals(cost=1)
    value = float(cost_expression(np.asarray(U, dtype=float), problem))
    log(5, f"[cost] J={value:.12g}\n")
    return value


@event_register("simulate")
def simulate(U, problem: OcpProblem, config_hash: str | None = None) -> Trajectory:
    """Roll the combined model out under ``U`` and record everything."""
    controls = problem.controls(np.asarray(U, dtype=float))
    states = rollout(problem.x_init, controls, problem.days, problem.params)
    model = get_crop_model(problem.model)
    dmf = problem.economics.dry_matter_fraction
    gh_hours = [h for x in states[1:] for h in x.gh_hours]
    return Trajectory(
        model=problem.model,
        crop_states=[x.crop for x in states],
        fruit_fresh=[model.fruit_fresh(x.crop, problem.params, dmf) for x in states],
        gh_hours=gh_hours,
        controls=np.array([list(u) for u in controls]),
        stage_costs=daily_stage_costs(controls, problem.weights.r),
        config_hash=config_hash,
    )


def trajectory_cost(trajectory: Trajectory, problem: OcpProblem) -> float:
    """Cost recomputed from a recorded trajectory."""
    controls = [GhControl(*row) for row in trajectory.controls]
    return float(
        stage_cost(controls, problem.weights.r)
        - terminal_value(trajectory.crop_states[-1], problem.weights.q)
    )
