"""
Cross-evaluation: controls optimized against one crop model, simulated with
another.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
import pandas as pd

from ..models.greenhouse import is_admissible
from ..scenario.trajectory import Trajectory
from ..utils import ConstraintError, log
from .cost import cost, simulate
from .problem import OcpProblem


@dataclass
class CrossResult:
    trajectory: Trajectory
    fruit_fresh_final: float  # kg/m2
    J: float  # euro/m2

    @property
    def economic_yield(self) -> float:
        return -self.J


def evaluate_cross(U, other_problem: OcpProblem) -> CrossResult:
    U = np.asarray(U, dtype=float)
    controls = other_problem.controls(U)
    bad = [i for i, u in enumerate(controls) if not is_admissible(u)]
    if bad:
        raise ConstraintError(f"controls of days {bad} are outside the control bounds")
    trajectory = simulate(U, other_problem)
    J = cost(U, other_problem)
    log(2, f"[cross] on {other_problem.model}: harvest={trajectory.final_fruit_fresh:.6g} J={J:.6g}\n")
    return CrossResult(trajectory, trajectory.final_fruit_fresh, J)


def cross_matrix(
    controls: Mapping[str, np.ndarray], problems: Mapping[str, OcpProblem]
) -> pd.DataFrame:
    """
    Every control sequence on every problem; one row per pair with the final
    fresh harvest and economic yield.
    """
    rows = []
    for source, U in controls.items():
        for target, problem in problems.items():
            result = evaluate_cross(U, problem)
            rows.append(
                {
                    "controls_from": source,
                    "evaluated_on": target,
                    "harvest_kg_m2": result.fruit_fresh_final,
                    "yield_eur_m2": result.economic_yield,
                    "J_eur_m2": result.J,
                }
            )
    return pd.DataFrame(
        rows,
        columns=["controls_from", "evaluated_on", "harvest_kg_m2", "yield_eur_m2", "J_eur_m2"],
    )
