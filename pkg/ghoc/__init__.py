from . import smoothing
from .coupling import (
    CombinedState,
    CouplingParams,
    ModelParams,
    combined_step,
    gh_mean,
    map_to_simple,
    map_to_tomgro,
)
from .diff import DualNumber, jacobian
from .diff.sensitivity import gradient_of_cost, value_and_gradient
from .models import (
    Disturbance,
    GhControl,
    GhParams,
    GhState,
    control_bounds,
    get_crop_model,
    gh_step,
    simple_fruit_yield,
    simple_step,
    tomgro_step,
)
from .ocp import CostWeights, OcpProblem, SolverConfig, cost, evaluate_cross, solve
from .scenario import ScenarioConfig, load_config, load_disturbances, validate
from .smoothing import SmoothingParams, soft_abs, soft_heaviside, soft_max, soft_min

__all__ = [
    "smoothing",
    "SmoothingParams",
    "soft_heaviside",
    "soft_abs",
    "soft_max",
    "soft_min",
    "DualNumber",
    "jacobian",
    "gradient_of_cost",
    "value_and_gradient",
    "simple_step",
    "simple_fruit_yield",
    "tomgro_step",
    "GhState",
    "GhControl",
    "Disturbance",
    "GhParams",
    "gh_step",
    "control_bounds",
    "get_crop_model",
    "CombinedState",
    "CouplingParams",
    "ModelParams",
    "combined_step",
    "gh_mean",
    "map_to_simple",
    "map_to_tomgro",
    "CostWeights",
    "OcpProblem",
    "SolverConfig",
    "cost",
    "solve",
    "evaluate_cross",
    "ScenarioConfig",
    "load_config",
    "load_disturbances",
    "validate",
]
