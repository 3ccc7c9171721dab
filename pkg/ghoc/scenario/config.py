"""
Scenario configuration.

A scenario file (YAML, or JSON when the name ends in ``.json``) is merged
over the packaged ``defaults.yaml``. Every key must already exist in the
defaults; the only free-form section is ``disturbance_columns``. Relative
file paths are resolved against the directory of the scenario file.
"""

from __future__ import annotations

import copy
import hashlib
import json
import os
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np
import pandas as pd
import yaml

from ..configs import load_defaults
from ..coupling import CombinedState, ModelParams, initial_state
from ..models.greenhouse import GhControl, GhState, is_admissible
from ..models.registry import crop_model_names, get_crop_model
from ..ocp.problem import CostWeights, Economics, OcpProblem, SolverConfig
from ..utils import ConfigError, DataError, GhocError, event_register, log
from .disturbances import load_disturbances
from .tables import ENCODING, first_undecodable_line, read_table
from .weather import synthetic_disturbances

FREE_FORM_SECTIONS = ("disturbance_columns",)
FILE_KEYS = ("disturbance_file", "climate_file", "experiment_file", "control_file")
CONTROL_SCHEDULE_SCHEMA = ["day_index", "u_q", "u_v", "u_co2"]


def _merge(base: dict, update: Mapping[str, Any], prefix: str = "") -> dict:
    for key, value in update.items():
        dotted = f"{prefix}{key}"
        if key not in base:
            raise ConfigError(f"unknown configuration key '{dotted}'", key=dotted)
        if key in FREE_FORM_SECTIONS and not prefix:
            if not isinstance(value, Mapping) or not all(
                isinstance(k, str) and isinstance(v, str) for k, v in value.items()
            ):
                raise ConfigError(f"'{dotted}' must map column names to column names", key=dotted)
            base[key] = dict(value)
        elif isinstance(base[key], dict):
            if not isinstance(value, Mapping):
                raise ConfigError(f"'{dotted}' must be a section", key=dotted)
            _merge(base[key], value, f"{dotted}.")
        else:
            base[key] = value
    return base


def _require(condition: bool, message: str, key: str):
    if not condition:
        raise ConfigError(message, key=key)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _check_types(data: Mapping[str, Any], defaults: Mapping[str, Any], prefix: str = ""):
    for key, default in defaults.items():
        dotted = f"{prefix}{key}"
        value = data[key]
        if key in FREE_FORM_SECTIONS and not prefix:
            continue
        if isinstance(default, dict):
            _check_types(value, default, f"{dotted}.")
        elif isinstance(default, bool):
            _require(isinstance(value, bool), f"'{dotted}' must be true or false", dotted)
        elif _is_number(default):
            _require(_is_number(value), f"'{dotted}' must be a number, got {value!r}", dotted)
            _require(bool(np.isfinite(value)), f"'{dotted}' must be finite", dotted)
            if isinstance(default, int):
                _require(float(value).is_integer(), f"'{dotted}' must be an integer", dotted)
        elif isinstance(default, str):
            _require(isinstance(value, str), f"'{dotted}' must be a string", dotted)
        elif default is None:
            if key in FILE_KEYS:
                ok, expected = value is None or isinstance(value, str), "a path"
            else:
                ok = value is None or (_is_number(value) and float(value).is_integer())
                expected = "an integer"
            _require(ok, f"'{dotted}' must be {expected} or null", dotted)
        elif isinstance(default, list):
            _require(
                isinstance(value, list)
                and len(value) == len(default)
                and all(map(_is_number, value)),
                f"'{dotted}' must be a list of {len(default)} numbers",
                dotted,
            )


def _check_ranges(data: Mapping[str, Any]):
    scenario = data["scenario"]
    _require(
        scenario["model"] in crop_model_names(),
        f"scenario.model must be one of {crop_model_names()}, got {scenario['model']!r}",
        "scenario.model",
    )
    _require(scenario["horizon"] >= 1, "scenario.horizon must be >= 1", "scenario.horizon")
    _require(scenario["seed"] >= 0, "scenario.seed must be >= 0", "scenario.seed")
    _require(scenario["start_day"] >= 0, "scenario.start_day must be >= 0", "scenario.start_day")
    weather = scenario["weather"]
    for key in ("R_peak", "wind", "wind_amplitude", "noise", "T_amplitude"):
        name = f"scenario.weather.{key}"
        _require(weather[key] >= 0, f"{name} must be >= 0", name)
    for key in ("C_H2O_out", "C_CO2_out"):
        name = f"scenario.weather.{key}"
        _require(weather[key] > 0, f"{name} must be > 0", name)
    _require(
        0 <= weather["sunrise"] < weather["sunset"] <= 24,
        "scenario.weather needs 0 <= sunrise < sunset <= 24",
        "scenario.weather.sunrise",
    )
    _require(
        is_admissible(GhControl(*data["controls"]["constant"])),
        f"controls.constant {data['controls']['constant']} is outside the control bounds",
        "controls.constant",
    )
    greenhouse = data["initial"]["greenhouse"]
    name = "initial.greenhouse.C_CO2"
    _require(greenhouse["C_CO2"] > 0, f"{name} must be > 0", name)
    name = "initial.greenhouse.C_H2O"
    _require(greenhouse["C_H2O"] >= 0, f"{name} must be >= 0", name)


@dataclass
class ScenarioConfig:
    data: dict[str, Any]
    path: str | None = None

    @classmethod
    def from_dict(
        cls, update: Mapping[str, Any] | None = None, path: str | None = None
    ) -> ScenarioConfig:
        data = _merge(load_defaults(), copy.deepcopy(dict(update or {})))
        _check_types(data, load_defaults())
        _check_ranges(data)
        config = cls(data, path)
        for key in FILE_KEYS:
            resolved = config.file(key)
            if resolved is not None and not os.path.exists(resolved):
                raise ConfigError(
                    f"scenario.{key} {resolved} does not exist", key=f"scenario.{key}"
                )
        # build every parameter set once so bad values fail at load time
        try:
            config.model_params()
            config.economics()
            config.solver_config()
        except GhocError as e:
            raise ConfigError(e.message, **e.details) from e
        return config

    @classmethod
    def load(cls, path: str) -> ScenarioConfig:
        return load_config(path)

    @property
    def base_dir(self) -> str:
        return os.path.dirname(os.path.abspath(self.path)) if self.path else os.getcwd()

    @property
    def model(self) -> str:
        return self.data["scenario"]["model"]

    @property
    def horizon(self) -> int:
        return int(self.data["scenario"]["horizon"])

    @property
    def seed(self) -> int:
        return int(self.data["scenario"]["seed"])

    def with_overrides(self, **scenario: Any) -> ScenarioConfig:
        """A copy with ``scenario`` keys replaced (``None`` values are ignored)."""
        data = copy.deepcopy(self.data)
        _merge(data, {"scenario": {k: v for k, v in scenario.items() if v is not None}})
        _check_types(data, load_defaults())
        _check_ranges(data)
        return ScenarioConfig(data, self.path)

    def file(self, key: str) -> str | None:
        value = self.data["scenario"][key]
        if value is None:
            return None
        return value if os.path.isabs(value) else os.path.join(self.base_dir, value)

    def config_hash(self, seed: int | None = None) -> str:
        seed = self.seed if seed is None else seed
        canonical = json.dumps({"config": self.data, "seed": seed}, sort_keys=True)
        return hashlib.sha256(canonical.encode()).hexdigest()

    def model_params(self) -> ModelParams:
        return ModelParams.from_config(self.data)

    def economics(self) -> Economics:
        return Economics.from_config(self.data["economics"])

    def solver_config(self, seed: int | None = None) -> SolverConfig:
        return SolverConfig.from_config(
            self.data["solver"], seed=self.seed if seed is None else seed
        )

    def initial_state(self, model: str | None = None) -> CombinedState:
        model = model or self.model
        crop = get_crop_model(model).initial_state(self.data["initial"][model])
        gh = GhState(**{k: float(v) for k, v in self.data["initial"]["greenhouse"].items()})
        return initial_state(crop, gh, model)

    def disturbances(self, N: int | None = None) -> np.ndarray:
        """``(N, 24, 6)`` from the disturbance file, or synthetic weather."""
        N = self.horizon if N is None else N
        path = self.file("disturbance_file")
        if path is None:
            return synthetic_disturbances(N, self.data["scenario"]["weather"], self.seed)
        series = load_disturbances(path, self.data["disturbance_columns"] or None)
        return series.days(N, offset=int(self.data["scenario"]["start_day"]))

    def constant_controls(self, N: int | None = None) -> np.ndarray:
        N = self.horizon if N is None else N
        return np.tile(np.asarray(self.data["controls"]["constant"], dtype=float), (N, 1))

    def control_schedule(self, N: int | None = None) -> np.ndarray:
        """Daily controls for simulation: the control file, else the constant."""
        N = self.horizon if N is None else N
        path = self.file("control_file")
        if path is None:
            return self.constant_controls(N)
        return load_control_schedule(path, N, int(self.data["scenario"]["start_day"]))

    def build_problem(self, model: str | None = None, N: int | None = None) -> OcpProblem:
        model = model or self.model
        N = self.horizon if N is None else N
        params = self.model_params()
        economics = self.economics()
        return OcpProblem(
            N=N,
            x_init=self.initial_state(model),
            weights=CostWeights.from_economics(economics, params, model),
            disturbances=self.disturbances(N),
            params=params,
            economics=economics,
        )


def load_control_schedule(path: str, N: int, start_day: int = 0) -> np.ndarray:
    """
    ``(N, 3)`` daily controls for days ``start_day .. start_day + N - 1``.

    ``day_index`` must be consecutive integers; the file may begin before
    ``start_day`` and run past the horizon.
    """
    frame = read_table(path, "control", float_precision="round_trip")
    columns = list(frame.columns[: len(CONTROL_SCHEDULE_SCHEMA)])
    if columns != CONTROL_SCHEDULE_SCHEMA:
        raise DataError(
            f"control file header must start with {','.join(CONTROL_SCHEDULE_SCHEMA)}", line=1
        )
    if frame.empty:
        raise DataError(f"control file {path} has no rows")
    numbers = frame[CONTROL_SCHEDULE_SCHEMA].apply(pd.to_numeric, errors="coerce")
    numbers = numbers.to_numpy(dtype=float)
    bad = np.flatnonzero(~np.isfinite(numbers).all(axis=1))
    if bad.size:
        raise DataError("day_index and controls must be finite numbers", line=int(bad[0]) + 2)
    days = numbers[:, 0]
    fractional = np.flatnonzero(days != np.round(days))
    if fractional.size:
        row = int(fractional[0])
        raise DataError(f"day_index {days[row]} is not an integer", line=row + 2)
    jumps = np.flatnonzero(np.diff(days) != 1)
    if jumps.size:
        row = int(jumps[0]) + 1
        raise DataError(
            f"day_index must increase by 1, got {days[row - 1]:g} then {days[row]:g}",
            line=row + 2,
        )
    first = int(start_day - days[0])
    if first < 0 or first + N > len(days):
        raise DataError(
            f"control file {path} covers days {days[0]:g}..{days[-1]:g}, "
            f"days {start_day}..{start_day + N - 1} needed"
        )
    U = numbers[first : first + N, 1:]
    for row, u in enumerate(U, start=first):
        if not is_admissible(GhControl(*u)):
            raise DataError(f"controls {u.tolist()} outside the control bounds", line=row + 2)
    return U


def _config_error_line(error: Exception) -> int | None:
    if isinstance(error, json.JSONDecodeError):
        return error.lineno
    mark = getattr(error, "problem_mark", None)
    return mark.line + 1 if mark is not None else None


@event_register("load_config")
def load_config(path: str) -> ScenarioConfig:
    if not os.path.exists(path):
        raise ConfigError(f"config file {path} does not exist")
    with open(path, encoding=ENCODING) as fp:
        try:
            if path.endswith(".json"):
                update = json.load(fp)
            else:
                update = yaml.safe_load(fp)
        except (yaml.YAMLError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot parse {path}: {e}", line=_config_error_line(e)) from e
        except UnicodeDecodeError as e:
            raise ConfigError(
                f"config file {path} is not {ENCODING} text: {e.reason}",
                line=first_undecodable_line(path),
            ) from e
    if update is None:
        update = {}
    if not isinstance(update, Mapping):
        raise ConfigError(f"{path} must hold a mapping of sections")
    config = ScenarioConfig.from_dict(update, path)
    log(
        1,
        f"[config] {path} model={config.model} N={config.horizon} "
        f"hash={config.config_hash()[:12]}\n",
    )
    return config
