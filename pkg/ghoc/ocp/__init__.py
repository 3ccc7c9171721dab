from .problem import CostWeights, Economics, OcpProblem, SolverConfig
from .cost import cost, simulate, stage_cost, terminal_value
from .solver import (
    OcpSolution,
    initial_controls,
    minimize_box,
    project,
    projected_gradient_norm,
    solve,
)
from .cross import CrossResult, cross_matrix, evaluate_cross

__all__ = [
    "Economics",
    "CostWeights",
    "OcpProblem",
    "SolverConfig",
    "cost",
    "simulate",
    "stage_cost",
    "terminal_value",
    "OcpSolution",
    "solve",
    "minimize_box",
    "initial_controls",
    "project",
    "projected_gradient_norm",
    "CrossResult",
    "evaluate_cross",
    "cross_matrix",
]
