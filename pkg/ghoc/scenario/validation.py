from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from ..utils import DataError, log
from .tables import read_table
from .trajectory import Trajectory

EXPERIMENT_SCHEMA = ["day_index", "fruit_fresh_kg_m2"]


def load_experiment(path: str) -> pd.DataFrame:
    """Daily fresh fruit weight observations, ``day_index,fruit_fresh_kg_m2``."""
    frame = read_table(path, "experiment", dtype=str, keep_default_na=False)
    if list(frame.columns) != EXPERIMENT_SCHEMA:
        raise DataError(
            f"header {','.join(frame.columns)} does not match {','.join(EXPERIMENT_SCHEMA)}",
            line=1,
        )
    numbers = frame.apply(pd.to_numeric, errors="coerce")
    for row, (day, weight) in enumerate(numbers.itertuples(index=False)):
        if not (math.isfinite(day) and math.isfinite(weight)):
            raise DataError(f"row {list(frame.iloc[row])} is not numeric", line=row + 2)
        if day != int(day):
            raise DataError(f"day_index {day} is not an integer", line=row + 2)
        if weight < 0:
            raise DataError(f"fruit_fresh_kg_m2={weight} is negative", line=row + 2)
    days = numbers["day_index"].to_numpy()
    if np.any(np.diff(days) <= 0):
        row = int(np.flatnonzero(np.diff(days) <= 0)[0]) + 1
        raise DataError("day_index must be strictly increasing", line=row + 2)
    numbers["day_index"] = numbers["day_index"].astype(int)
    return numbers


@dataclass
class ValidationReport:
    rmse: float  # kg/m2
    signed_final_error: float  # simulated minus observed, kg/m2
    final_day: int
    residuals: pd.DataFrame  # day_index, simulated, observed, residual

    def to_dict(self) -> dict:
        return {
            "rmse_kg_m2": self.rmse,
            "signed_final_error_kg_m2": self.signed_final_error,
            "final_day": self.final_day,
            "points": len(self.residuals),
        }


def validate(trajectory: Trajectory, experiment: pd.DataFrame) -> ValidationReport:
    """
    Compare the simulated fresh fruit weight with observations on the days
    both cover.

    Examples:
        >>> from ghoc.models import CropStateSimple
        >>> t = Trajectory("simple", [CropStateSimple(0.0, 0.0, 0.0)] * 3, [0.0, 1.0, 2.0])
        >>> obs = pd.DataFrame({"day_index": [1, 2], "fruit_fresh_kg_m2": [1.0, 2.0]})
        >>> validate(t, obs).rmse
        0.0
    """
    simulated = pd.DataFrame(
        {"day_index": trajectory.day_index, "simulated": trajectory.fruit_fresh}
    )
    observed = experiment.rename(columns={"fruit_fresh_kg_m2": "observed"})
    merged = simulated.merge(observed, on="day_index", how="inner")
    if merged.empty:
        raise DataError(
            f"no common days: trajectory covers {trajectory.day_index[0]}..{trajectory.day_index[-1]}"
        )
    merged["residual"] = merged["simulated"] - merged["observed"]
    residual = merged["residual"].to_numpy()
    report = ValidationReport(
        rmse=float(np.sqrt(np.mean(residual**2))),
        signed_final_error=float(residual[-1]),
        final_day=int(merged["day_index"].iloc[-1]),
        residuals=merged,
    )
    log(1, f"[validate] rmse={report.rmse:.4g} final_error={report.signed_final_error:+.4g} day={report.final_day}\n")
    return report
