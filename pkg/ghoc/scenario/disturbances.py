"""
Hourly disturbance CSV ingestion.

The file header must read exactly::

    timestamp_iso8601,R_out_Wm2,T_out_C,wind_ms,T_soil_C,C_H2O_out_kgm3,C_CO2_out_ppm

Timestamps are ISO 8601, on the hour, strictly increasing and start at
midnight so that day ``i`` covers rows ``24 i .. 24 i + 23``. Up to two
missing hours in a row are filled by linear interpolation and flagged;
longer gaps are rejected. Errors name the offending file line.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
import pandas as pd

from ..coupling import HOURS_PER_DAY
from ..utils import DataError, ShapeError, event_register, log
from .tables import read_table

TIMESTAMP_COLUMN = "timestamp_iso8601"
VALUE_COLUMNS = [
    "R_out_Wm2",
    "T_out_C",
    "wind_ms",
    "T_soil_C",
    "C_H2O_out_kgm3",
    "C_CO2_out_ppm",
]
SCHEMA = [TIMESTAMP_COLUMN, *VALUE_COLUMNS]

# (lower, upper, lower bound inclusive)
VALUE_RANGES = {
    "R_out_Wm2": (0.0, 2000.0, True),
    "T_out_C": (-60.0, 60.0, True),
    "wind_ms": (0.0, 75.0, True),
    "T_soil_C": (-40.0, 60.0, True),
    "C_H2O_out_kgm3": (0.0, 0.1, False),
    "C_CO2_out_ppm": (0.0, 5000.0, False),
}

MAX_INTERPOLATED_GAP = 2  # hours


def _line(row: int) -> int:
    # header is line 1
    return row + 2


@dataclass(frozen=True)
class DisturbanceSeries:
    timestamps: pd.DatetimeIndex
    values: np.ndarray  # (hours, 6) in the units of Disturbance
    interpolated: np.ndarray  # (hours,) bool
    source: str | None = None

    @property
    def n_hours(self) -> int:
        return len(self.values)

    @property
    def n_days(self) -> int:
        return self.n_hours // HOURS_PER_DAY

    def days(self, N: int, offset: int = 0) -> np.ndarray:
        """Disturbances of days ``offset .. offset + N - 1`` as ``(N, 24, 6)``."""
        if offset + N > self.n_days:
            raise ShapeError(
                f"{N} days from day {offset} requested but {self.source or 'the series'} holds {self.n_days} full days"
            )
        start = offset * HOURS_PER_DAY
        return self.values[start : start + N * HOURS_PER_DAY].reshape(
            N, HOURS_PER_DAY, len(VALUE_COLUMNS)
        )

    def report(self) -> dict:
        return {
            "source": self.source,
            "hours": self.n_hours,
            "days": self.n_days,
            "interpolated_hours": int(self.interpolated.sum()),
            "interpolated_timestamps": [
                ts.isoformat() for ts in self.timestamps[self.interpolated]
            ],
        }


def _apply_column_map(frame: pd.DataFrame, column_map: Mapping[str, str] | None):
    if not column_map:
        if list(frame.columns) != SCHEMA:
            raise DataError(
                f"header {','.join(map(str, frame.columns))} does not match {','.join(SCHEMA)}",
                line=1,
            )
        return frame
    frame = frame.rename(columns=dict(column_map))
    missing = [c for c in SCHEMA if c not in frame.columns]
    if missing:
        raise DataError(f"columns {missing} missing after applying the column map", line=1)
    return frame[SCHEMA]


def _parse(frame: pd.DataFrame) -> tuple[pd.DatetimeIndex, np.ndarray]:
    stamps = pd.to_datetime(frame[TIMESTAMP_COLUMN], format="ISO8601", errors="coerce")
    bad = np.flatnonzero(stamps.isna().to_numpy())
    if bad.size:
        row = int(bad[0])
        raise DataError(
            f"timestamp {frame[TIMESTAMP_COLUMN].iloc[row]!r} is not ISO 8601",
            line=_line(row),
        )
    stamps = pd.DatetimeIndex(stamps)
    values = np.empty((len(frame), len(VALUE_COLUMNS)))
    for k, column in enumerate(VALUE_COLUMNS):
        numbers = pd.to_numeric(frame[column], errors="coerce")
        bad = np.flatnonzero(~np.isfinite(numbers.to_numpy(dtype=float)))
        if bad.size:
            row = int(bad[0])
            raise DataError(
                f"{column}={frame[column].iloc[row]!r} is not a finite number",
                line=_line(row),
            )
        lo, hi, inclusive = VALUE_RANGES[column]
        col = numbers.to_numpy(dtype=float)
        below = col < lo if inclusive else col <= lo
        out = np.flatnonzero(below | (col > hi))
        if out.size:
            row = int(out[0])
            bracket = "[" if inclusive else "("
            raise DataError(
                f"{column}={col[row]} outside {bracket}{lo}, {hi}]", line=_line(row)
            )
        values[:, k] = col
    return stamps, values


def _check_timeline(stamps: pd.DatetimeIndex):
    off_hour = np.flatnonzero(
        (stamps.minute != 0) | (stamps.second != 0) | (stamps.microsecond != 0)
    )
    if off_hour.size:
        row = int(off_hour[0])
        raise DataError(f"timestamp {stamps[row]} is not on the hour", line=_line(row))
    if stamps[0].hour != 0:
        raise DataError(
            f"series must start at midnight, starts at {stamps[0]}", line=_line(0)
        )
    steps = np.diff(stamps.asi8) / 3.6e12 if len(stamps) > 1 else np.zeros(0)
    backwards = np.flatnonzero(steps <= 0)
    if backwards.size:
        row = int(backwards[0]) + 1
        raise DataError(
            f"timestamp {stamps[row]} does not increase on {stamps[row - 1]}", line=_line(row)
        )
    gaps = np.flatnonzero(steps > MAX_INTERPOLATED_GAP + 1)
    if gaps.size:
        row = int(gaps[0]) + 1
        raise DataError(
            f"{int(steps[row - 1]) - 1} missing hours before {stamps[row]}; at most {MAX_INTERPOLATED_GAP} are interpolated",
            line=_line(row),
        )


@event_register("load_disturbances")
def load_disturbances(
    path: str, column_map: Mapping[str, str] | None = None
) -> DisturbanceSeries:
    """
    Read, validate and gap-fill an hourly disturbance CSV. A trailing
    partial day is kept in the series but never handed out by ``days``.
    """
    frame = read_table(path, "disturbance", dtype=str, keep_default_na=False)
    frame = _apply_column_map(frame, column_map)
    if frame.empty:
        raise DataError(f"disturbance file {path} has no rows")
    stamps, values = _parse(frame)
    _check_timeline(stamps)

    full = pd.date_range(stamps[0], stamps[-1], freq=pd.Timedelta(hours=1))
    table = pd.DataFrame(values, index=stamps, columns=VALUE_COLUMNS).reindex(full)
    interpolated = table[VALUE_COLUMNS[0]].isna().to_numpy()
    table = table.interpolate(method="linear")
    for ts in full[interpolated]:
        log(3, f"[load_disturbances] interpolated {ts.isoformat()}\n")
    series = DisturbanceSeries(
        timestamps=full,
        values=table.to_numpy(dtype=float),
        interpolated=interpolated,
        source=path,
    )
    log(
        1,
        f"[load_disturbances] {path}: {series.n_hours} hours, {series.n_days} days, {int(interpolated.sum())} interpolated\n",
    )
    return series
