"""
Daily combined crop and greenhouse model.

A :class:`CombinedState` holds one crop state and the 24 hourly greenhouse
states of the day that produced it. :func:`combined_step` holds the daily
control for 24 greenhouse hours, averages the new hours and advances the
crop once on the mapped daily inputs. Day ``i`` covers hourly indices
``24 i`` to ``24 i + 23``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from .diff.ops import mean
from .models.greenhouse import Disturbance, GhControl, GhParams, GhState, check_control, gh_step
from .models.registry import get_crop_model
from .models.simple import CropInputSimple, SimpleParams
from .models.tomgro import CropInputTomgro, TomgroParams
from .smoothing import SmoothingParams
from .utils import (
    ConfigError,
    DataError,
    ParameterError,
    ShapeError,
    event_register,
    inner_error_default_handler,
    log,
)

HOURS_PER_DAY = 24


@dataclass(frozen=True)
class CouplingParams:
    transmissivity: float = 0.7
    daytime_start: int = 6
    daytime_end: int = 18

    def __post_init__(self):
        if not 0.0 < self.transmissivity <= 1.0:
            raise ParameterError(
                f"coupling.transmissivity must lie in (0, 1], got {self.transmissivity}"
            )
        daytime_window(self.daytime_start, self.daytime_end)

    @classmethod
    def from_config(cls, section: Mapping[str, Any]) -> CouplingParams:
        return cls(
            transmissivity=float(section.get("transmissivity", 0.7)),
            daytime_start=int(section.get("daytime_start", 6)),
            daytime_end=int(section.get("daytime_end", 18)),
        )


@dataclass(frozen=True)
class ModelParams:
    """Every parameter set one combined simulation needs."""

    simple: SimpleParams
    tomgro: TomgroParams
    greenhouse: GhParams
    smoothing: SmoothingParams
    coupling: CouplingParams

    @classmethod
    def from_config(cls, config: Mapping[str, Any]) -> ModelParams:
        return cls(
            simple=SimpleParams.from_config(config["simple"]),
            tomgro=TomgroParams.from_config(config["tomgro"]),
            greenhouse=GhParams.from_config(config["greenhouse"]),
            smoothing=SmoothingParams.from_config(config["smoothing"]),
            coupling=CouplingParams.from_config(config["coupling"]),
        )


@dataclass(frozen=True)
class CombinedState:
    crop: Any
    gh_hours: tuple[GhState, ...]
    model: str

    def __post_init__(self):
        if len(self.gh_hours) != HOURS_PER_DAY:
            raise ShapeError(
                f"a combined state holds {HOURS_PER_DAY} hourly greenhouse states, got {len(self.gh_hours)}"
            )
        get_crop_model(self.model)


def daytime_window(start: int, end: int) -> range:
    if not (0 <= start < end <= HOURS_PER_DAY):
        raise ConfigError(
            f"daytime window [{start}, {end}) is empty or outside the day"
        )
    return range(start, end)


def initial_state(crop, gh: GhState, model: str) -> CombinedState:
    """Combined state whose previous day sat at ``gh`` for all 24 hours."""
    return CombinedState(crop, (gh,) * HOURS_PER_DAY, model)


def gh_mean(gh_hours: Sequence[GhState]) -> GhState:
    """
    Componentwise mean of one day of hourly greenhouse states.

    Examples:
        >>> s = GhState(20.0, 18.0, 40.0, 600.0, 0.01)
        >>> gh_mean([s] * 24) == s
        True
    """
    if len(gh_hours) != HOURS_PER_DAY:
        raise ShapeError(f"expected {HOURS_PER_DAY} hourly states, got {len(gh_hours)}")
    return GhState(*(mean(column) for column in zip(*gh_hours)))


def daily_radiation(d_day: Sequence[Disturbance], transmissivity: float) -> float:
    """
    Radiation reaching the crop over one day, MJ/m2, from hourly outside
    radiation in W/m2.

    Examples:
        >>> d = Disturbance(100.0, 10.0, 0.0, 10.0, 0.005, 400.0)
        >>> daily_radiation([d] * 24, 1.0)
        8.64
    """
    return transmissivity * math.fsum(float(d.R_out) * 3600.0 for d in d_day) / 1e6


def map_to_simple(mean_state: GhState, radiation: float | None) -> CropInputSimple:
    if radiation is None:
        raise DataError("no radiation series to derive the crop radiation input from")
    return get_crop_model("simple").climate_input(
        mean_state.T_g, None, radiation, mean_state.C_CO2
    )


def map_to_tomgro(
    mean_state: GhState,
    hourly_tg: Sequence[Any],
    radiation: float | None,
    window: tuple[int, int] = (6, 18),
) -> CropInputTomgro:
    """
    Examples:
        >>> s = GhState(20.0, 18.0, 40.0, 600.0, 0.01)
        >>> u = map_to_tomgro(s, [20.0] * 24, 5.0)
        >>> (u.T, u.T_d)
        (20.0, 20.0)
    """
    if radiation is None:
        raise DataError("no radiation series to derive the crop radiation input from")
    hours = daytime_window(*window)
    t_day = mean([hourly_tg[h] for h in hours])
    return get_crop_model("tomgro").climate_input(
        mean_state.T_g, t_day, radiation, mean_state.C_CO2
    )


def map_inputs(model: str, mean_state: GhState, hourly_tg, radiation, coupling: CouplingParams):
    if model == "simple":
        return map_to_simple(mean_state, radiation)
    return map_to_tomgro(
        mean_state, hourly_tg, radiation, (coupling.daytime_start, coupling.daytime_end)
    )


@event_register("combined_step", 1)
def combined_step(
    x: CombinedState,
    u_day: GhControl,
    d_day: Sequence[Disturbance],
    params: ModelParams,
    day: int | None = None,
) -> CombinedState:
    """
    Advance the combined state by one day under the constant control
    ``u_day`` and the 24 hourly disturbances ``d_day``.
    """
    if len(d_day) != HOURS_PER_DAY:
        raise ShapeError(f"expected {HOURS_PER_DAY} disturbance rows per day, got {len(d_day)}")
    check_control(u_day)
    model = get_crop_model(x.model)

    hours = []
    h = x.gh_hours[-1]
    for d in d_day:
        h = gh_step(h, u_day, d, params.greenhouse, params.smoothing)
        hours.append(h)

    mean_state = gh_mean(hours)
    radiation = daily_radiation(d_day, params.coupling.transmissivity)
    u_crop = map_inputs(
        x.model, mean_state, [hh.T_g for hh in hours], radiation, params.coupling
    )
    crop = model.step(x.crop, u_crop, params)
    log(3, f"[combined_step] day={day} model={x.model} R={radiation:.4g}\n")
    return CombinedState(crop, tuple(hours), x.model)


def _step_failure_message(x, u_day, d_day, params, day=None):
    return f"combined step failed on day {day}"


def rollout(
    x0: CombinedState,
    controls: Sequence[GhControl],
    days: Sequence[Sequence[Disturbance]],
    params: ModelParams,
) -> list[CombinedState]:
    """States ``x_0 .. x_N`` under daily controls ``u_0 .. u_{N-1}``."""
    if len(controls) != len(days):
        raise ShapeError(f"{len(controls)} daily controls for {len(days)} days of disturbances")
    step = inner_error_default_handler(combined_step, _step_failure_message)
    states = [x0]
    for i, (u, d_day) in enumerate(zip(controls, days)):
        states.append(step(states[-1], u, d_day, params, day=i))
    return states


def flatten(x: CombinedState) -> np.ndarray:
    """Crop components followed by the 24 hourly greenhouse states."""
    values = list(x.crop)
    for h in x.gh_hours:
        values.extend(h)
    return np.array(values, dtype=object if any(not np.isscalar(v) for v in values) else float)


def unflatten(vector: Sequence[Any], model: str) -> CombinedState:
    crop_cls = get_crop_model(model).state_cls
    n_crop = len(crop_cls._fields)
    n_gh = len(GhState._fields)
    expected = n_crop + HOURS_PER_DAY * n_gh
    if len(vector) != expected:
        raise ShapeError(f"a flat {model} combined state has {expected} entries, got {len(vector)}")
    values = list(vector)
    crop = crop_cls(*values[:n_crop])
    hours = tuple(
        GhState(*values[n_crop + k * n_gh : n_crop + (k + 1) * n_gh])
        for k in range(HOURS_PER_DAY)
    )
    return CombinedState(crop, hours, model)
