from .trajectory import Trajectory, load_trajectory, save_trajectory
from .disturbances import DisturbanceSeries, load_disturbances
from .weather import synthetic_disturbances
from .climate import DailyClimate, load_daily_climate, simulate_crop
from .validation import ValidationReport, load_experiment, validate
from .config import ScenarioConfig, load_config, load_control_schedule
from .report import economics_summary, write_solver_history, write_summary

__all__ = [
    "Trajectory",
    "save_trajectory",
    "load_trajectory",
    "DisturbanceSeries",
    "load_disturbances",
    "synthetic_disturbances",
    "DailyClimate",
    "load_daily_climate",
    "simulate_crop",
    "ValidationReport",
    "load_experiment",
    "validate",
    "ScenarioConfig",
    "load_config",
    "load_control_schedule",
    "economics_summary",
    "write_summary",
    "write_solver_history",
]
