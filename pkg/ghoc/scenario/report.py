"""
Run summaries: the economic figures of a trajectory and their JSON/CSV
export.
"""

from __future__ import annotations

import json
import math
import os
from typing import Any, Sequence

import numpy as np
import pandas as pd

from ..coupling import HOURS_PER_DAY
from ..models.greenhouse import GhControl
from ..ocp.problem import OcpProblem
from ..utils import log
from .trajectory import FLOAT_FORMAT, Trajectory


def economics_summary(trajectory: Trajectory, problem: OcpProblem, J: float) -> dict[str, Any]:
    """Harvest, yield, resource use and mean climate of one rollout."""
    gh = problem.params.greenhouse
    controls = trajectory.controls
    heating = math.fsum(controls[:, 0]) * gh.heat_capacity / 1000.0 * HOURS_PER_DAY
    co2 = math.fsum(controls[:, 2]) * gh.co2_capacity * 86400.0
    means = controls.mean(axis=0) if len(controls) else np.zeros(len(GhControl._fields))
    return {
        "model": trajectory.model,
        "N": trajectory.N,
        "J_eur_m2": J,
        "economic_yield_eur_m2": -J,
        "harvest_kg_m2": trajectory.final_fruit_fresh,
        "heating_kwh_m2": heating,
        "co2_kg_m2": co2,
        "mean_controls": dict(zip(GhControl._fields, map(float, means))),
        "mean_T_g": trajectory.mean_temperature(),
    }


def _jsonable(obj: Any):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return str(obj)


def write_summary(path: str, summary: dict[str, Any]):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fp:
        json.dump(summary, fp, indent=4, sort_keys=True, default=_jsonable)
        fp.write("\n")
    log(3, f"[write_summary] {path}\n")


def write_solver_history(path: str, cost_history: Sequence[float], pg_history: Sequence[float]):
    """``iteration,J_eur_m2,projected_gradient``; missing norms stay empty."""
    pg = list(pg_history) + [float("nan")] * (len(cost_history) - len(pg_history))
    frame = pd.DataFrame(
        {
            "iteration": np.arange(len(cost_history)),
            "J_eur_m2": np.asarray(cost_history, dtype=float),
            "projected_gradient": np.asarray(pg[: len(cost_history)], dtype=float),
        }
    )
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
