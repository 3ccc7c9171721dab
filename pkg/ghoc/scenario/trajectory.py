"""
Simulated trajectories and their CSV/JSON persistence.

A saved trajectory is a directory with

* ``daily.csv``: ``day_index``, the crop state fields, ``fruit_fresh_kg_m2``
* ``hourly.csv``: ``hour_index,day_index,hour,T_g,T_s,T_p,C_CO2,C_H2O``
* ``controls.csv``: ``day_index,u_q,u_v,u_co2,stage_cost_eur``
* ``trajectory.json``: model name, horizon, start day and config hash

Reals are written with 17 significant digits, so loading a saved
trajectory gives back the same floats.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import pandas as pd

from ..models.greenhouse import GhControl, GhState
from ..models.registry import get_crop_model
from ..utils import DataError, ShapeError, log
from .tables import ENCODING, first_undecodable_line, read_table

FLOAT_FORMAT = "%.17g"
CONTROL_COLUMNS = ["day_index", *GhControl._fields, "stage_cost_eur"]
HOURLY_COLUMNS = ["hour_index", "day_index", "hour", *GhState._fields]


@dataclass
class Trajectory:
    model: str
    crop_states: list[Any]
    fruit_fresh: np.ndarray
    gh_hours: list[GhState] = field(default_factory=list)
    controls: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    stage_costs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    start_day: int = 0
    config_hash: str | None = None

    def __post_init__(self):
        self.fruit_fresh = np.asarray(self.fruit_fresh, dtype=float)
        self.controls = np.asarray(self.controls, dtype=float).reshape(-1, 3)
        self.stage_costs = np.asarray(self.stage_costs, dtype=float)
        n = self.N
        if n < 0:
            raise ShapeError("a trajectory holds at least the initial crop state")
        if len(self.fruit_fresh) != n + 1:
            raise ShapeError(f"{len(self.fruit_fresh)} fresh weights for {n + 1} crop states")
        if len(self.gh_hours) not in (0, 24 * n):
            raise ShapeError(f"{len(self.gh_hours)} hourly states for {n} days")
        if len(self.controls) not in (0, n) or len(self.stage_costs) != len(self.controls):
            raise ShapeError(
                f"{len(self.controls)} controls and {len(self.stage_costs)} stage costs "
                f"for {n} days"
            )

    @property
    def N(self) -> int:
        return len(self.crop_states) - 1

    @property
    def day_index(self) -> np.ndarray:
        return self.start_day + np.arange(self.N + 1)

    @property
    def final_fruit_fresh(self) -> float:
        return float(self.fruit_fresh[-1])

    def daily_frame(self) -> pd.DataFrame:
        fields = list(get_crop_model(self.model).state_cls._fields)
        frame = pd.DataFrame(
            [[float(v) for v in x] for x in self.crop_states], columns=fields
        )
        frame.insert(0, "day_index", self.day_index)
        frame["fruit_fresh_kg_m2"] = self.fruit_fresh
        return frame

    def hourly_frame(self) -> pd.DataFrame:
        hours = np.arange(len(self.gh_hours))
        frame = pd.DataFrame(
            [[float(v) for v in h] for h in self.gh_hours],
            columns=list(GhState._fields),
        )
        frame.insert(0, "hour", hours % 24)
        frame.insert(0, "day_index", self.start_day + hours // 24)
        frame.insert(0, "hour_index", hours)
        return frame

    def controls_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.controls, columns=list(GhControl._fields))
        frame.insert(0, "day_index", self.start_day + np.arange(len(self.controls)))
        frame["stage_cost_eur"] = self.stage_costs
        return frame

    def mean_temperature(self) -> float | None:
        if not self.gh_hours:
            return None
        return float(np.mean([h.T_g for h in self.gh_hours]))

    def allclose(self, other: Trajectory, tol: float = 1e-12) -> bool:
        if (self.model, self.N, self.start_day) != (other.model, other.N, other.start_day):
            return False
        if len(self.gh_hours) != len(other.gh_hours):
            return False
        pairs = [
            (self.daily_frame().to_numpy(), other.daily_frame().to_numpy()),
            (self.controls_frame().to_numpy(), other.controls_frame().to_numpy()),
            (np.asarray(self.gh_hours, float), np.asarray(other.gh_hours, float)),
        ]
        return all(a.shape == b.shape and np.allclose(a, b, rtol=tol, atol=tol) for a, b in pairs)


def save_trajectory(trajectory: Trajectory, out_dir: str):
    os.makedirs(out_dir, exist_ok=True)
    trajectory.daily_frame().to_csv(
        os.path.join(out_dir, "daily.csv"), index=False, float_format=FLOAT_FORMAT
    )
    trajectory.hourly_frame().to_csv(
        os.path.join(out_dir, "hourly.csv"), index=False, float_format=FLOAT_FORMAT
    )
    trajectory.controls_frame().to_csv(
        os.path.join(out_dir, "controls.csv"), index=False, float_format=FLOAT_FORMAT
    )
    meta = {
        "model": trajectory.model,
        "N": trajectory.N,
        "start_day": trajectory.start_day,
        "config_hash": trajectory.config_hash,
    }
    with open(os.path.join(out_dir, "trajectory.json"), "w") as fp:
        json.dump(meta, fp, indent=4)
    log(3, f"[save_trajectory] {trajectory.N} days to {out_dir}\n")


def load_trajectory(out_dir: str) -> Trajectory:
    meta_path = os.path.join(out_dir, "trajectory.json")
    if not os.path.exists(meta_path):
        raise DataError(f"no trajectory.json in {out_dir}")
    try:
        with open(meta_path, encoding=ENCODING) as fp:
            meta = json.load(fp)
    except json.JSONDecodeError as e:
        raise DataError(f"cannot parse {meta_path}: {e.msg}", line=e.lineno) from e
    except UnicodeDecodeError as e:
        raise DataError(
            f"{meta_path} is not {ENCODING} text", line=first_undecodable_line(meta_path)
        ) from e
    crop_cls = get_crop_model(meta["model"]).state_cls
    daily, hourly, controls = (
        read_table(os.path.join(out_dir, f"{name}.csv"), name, float_precision="round_trip")
        for name in ("daily", "hourly", "controls")
    )
    expected = ["day_index", *crop_cls._fields, "fruit_fresh_kg_m2"]
    if list(daily.columns) != expected:
        raise DataError(f"daily.csv header {list(daily.columns)} != {expected}")
    if list(hourly.columns) != HOURLY_COLUMNS or list(controls.columns) != CONTROL_COLUMNS:
        raise DataError(f"unexpected hourly.csv or controls.csv header in {out_dir}")
    crop_states = [
        crop_cls(*(float(v) for v in row))
        for row in daily[list(crop_cls._fields)].itertuples(index=False)
    ]
    gh_hours = [
        GhState(*(float(v) for v in row))
        for row in hourly[list(GhState._fields)].itertuples(index=False)
    ]
    return Trajectory(
        model=meta["model"],
        crop_states=crop_states,
        fruit_fresh=daily["fruit_fresh_kg_m2"].to_numpy(dtype=float),
        gh_hours=gh_hours,
        controls=controls[list(GhControl._fields)].to_numpy(dtype=float),
        stage_costs=controls["stage_cost_eur"].to_numpy(dtype=float),
        start_day=int(meta["start_day"]),
        config_hash=meta.get("config_hash"),
    )
