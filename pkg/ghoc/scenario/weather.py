"""
Deterministic synthetic weather for scenarios without a disturbance file.
"""

from __future__ import annotations

from typing import Any, Mapping

import numpy as np

from ..coupling import HOURS_PER_DAY
from ..utils import ConfigError, log


def diurnal(
    hours: np.ndarray, cfg: Mapping[str, Any]
) -> tuple[np.ndarray, np.ndarray]:
    """
    Clear-sky radiation (W/m2) and outside temperature (degC) at the given
    hours of the day.

    Examples:
        >>> cfg = {"T_mean": 10.0, "T_amplitude": 5.0, "R_peak": 600.0, "sunrise": 6, "sunset": 18}
        >>> R, T = diurnal(np.array([3.0, 12.0, 15.0]), cfg)
        >>> R[:2].tolist(), T[[0, 2]].tolist()
        ([0.0, 600.0], [5.0, 15.0])
    """
    sunrise, sunset = float(cfg["sunrise"]), float(cfg["sunset"])
    if not 0.0 <= sunrise < sunset <= 24.0:
        raise ConfigError(
            f"scenario.weather: need 0 <= sunrise < sunset <= 24, got {sunrise}, {sunset}"
        )
    phase = (hours - sunrise) / (sunset - sunrise)
    daylight = (phase >= 0.0) & (phase <= 1.0)
    arc = np.sin(np.pi * np.clip(phase, 0.0, 1.0))
    radiation = np.where(daylight, float(cfg["R_peak"]) * arc, 0.0)
    # coldest at 3:00, warmest at 15:00
    temperature = float(cfg["T_mean"]) + float(cfg["T_amplitude"]) * np.sin(
        2.0 * np.pi * (hours - 9.0) / 24.0
    )
    return np.round(radiation, 12) + 0.0, np.round(temperature, 12)


def synthetic_disturbances(N: int, cfg: Mapping[str, Any], seed: int = 0) -> np.ndarray:
    """``(N, 24, 6)`` disturbances: diurnal radiation and temperature, a
    slowly varying wind, constant soil temperature and outside concentrations.
    ``cfg["noise"] > 0`` scales each day's radiation by a seeded random factor."""
    if N < 1:
        raise ConfigError(f"horizon must be >= 1, got {N}")
    rng = np.random.default_rng(seed)
    hours = np.arange(HOURS_PER_DAY, dtype=float)
    radiation, temperature = diurnal(hours, cfg)
    out = np.empty((N, HOURS_PER_DAY, 6))
    noise = float(cfg.get("noise", 0.0))
    for day in range(N):
        scale = max(0.0, 1.0 + noise * rng.standard_normal()) if noise > 0 else 1.0
        wind = float(cfg["wind"]) + float(cfg["wind_amplitude"]) * np.sin(
            2.0 * np.pi * hours / HOURS_PER_DAY + day
        )
        out[day, :, 0] = radiation * scale
        out[day, :, 1] = temperature
        out[day, :, 2] = np.maximum(wind, 0.0)
        out[day, :, 3] = float(cfg["T_soil"])
        out[day, :, 4] = float(cfg["C_H2O_out"])
        out[day, :, 5] = float(cfg["C_CO2_out"])
    log(3, f"[weather] {N} synthetic days, seed={seed}\n")
    return out
