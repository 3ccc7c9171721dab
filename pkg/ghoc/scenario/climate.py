"""
Crop-only driving mode: daily climate records feed the crop models directly,
without the greenhouse model. This is the validation workflow, where the
recorded greenhouse climate stands in for the simulated one.

Schema::

    day_index,T_mean_C,T_day_C,R_MJm2,C_CO2_ppm
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from ..coupling import ModelParams
from ..models.registry import get_crop_model
from ..utils import DataError, ShapeError, inner_error_default_handler, log
from .tables import read_table
from .trajectory import Trajectory

CLIMATE_SCHEMA = ["day_index", "T_mean_C", "T_day_C", "R_MJm2", "C_CO2_ppm"]


@dataclass(frozen=True)
class DailyClimate:
    day_index: np.ndarray  # (N,) consecutive ints
    values: np.ndarray  # (N, 4): T, T_d, R, C_CO2

    @property
    def N(self) -> int:
        return len(self.day_index)


def load_daily_climate(path: str) -> DailyClimate:
    frame = read_table(path, "climate", dtype=str, keep_default_na=False)
    if list(frame.columns) != CLIMATE_SCHEMA:
        raise DataError(
            f"header {','.join(frame.columns)} does not match {','.join(CLIMATE_SCHEMA)}",
            line=1,
        )
    if frame.empty:
        raise DataError(f"climate file {path} has no rows")
    numbers = frame.apply(pd.to_numeric, errors="coerce").to_numpy(dtype=float)
    bad_rows, bad_cols = np.nonzero(~np.isfinite(numbers))
    if bad_rows.size:
        row, col = int(bad_rows[0]), int(bad_cols[0])
        raise DataError(
            f"{CLIMATE_SCHEMA[col]}={frame.iloc[row, col]!r} is not a finite number",
            line=row + 2,
        )
    days = numbers[:, 0]
    if np.any(days != np.round(days)):
        row = int(np.flatnonzero(days != np.round(days))[0])
        raise DataError(f"day_index {days[row]} is not an integer", line=row + 2)
    jumps = np.flatnonzero(np.diff(days) != 1)
    if jumps.size:
        row = int(jumps[0]) + 1
        raise DataError(
            f"day_index must increase by 1, got {days[row - 1]:g} then {days[row]:g}",
            line=row + 2,
        )
    negative = np.flatnonzero(numbers[:, 3] < 0)
    if negative.size:
        row = int(negative[0])
        raise DataError(f"R_MJm2={numbers[row, 3]} is negative", line=row + 2)
    nonpositive = np.flatnonzero(numbers[:, 4] <= 0)
    if nonpositive.size:
        row = int(nonpositive[0])
        raise DataError(f"C_CO2_ppm={numbers[row, 4]} must be > 0", line=row + 2)
    log(1, f"[load_daily_climate] {path}: {len(days)} days\n")
    return DailyClimate(days.astype(int), numbers[:, 1:])


def simulate_crop(
    model_name: str,
    x0,
    climate: DailyClimate,
    params: ModelParams,
    dry_matter_fraction: float,
    N: int | None = None,
) -> Trajectory:
    """Crop-only trajectory over the first ``N`` climate days."""
    N = climate.N if N is None else N
    if not 1 <= N <= climate.N:
        raise ShapeError(f"{N} days requested, the climate record holds {climate.N}")
    model = get_crop_model(model_name)
    step = inner_error_default_handler(
        model.step, lambda x, u, params: f"{model_name} crop step failed"
    )
    states = [x0]
    for T, T_d, R, C in climate.values[:N]:
        u = model.climate_input(float(T), float(T_d), float(R), float(C))
        states.append(step(states[-1], u, params))
    fresh = [model.fruit_fresh(x, params, dry_matter_fraction) for x in states]
    return Trajectory(
        model=model_name,
        crop_states=states,
        fruit_fresh=fresh,
        start_day=int(climate.day_index[0]),
    )
