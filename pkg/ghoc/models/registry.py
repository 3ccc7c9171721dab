from __future__ import annotations

from typing import Any, Mapping

import numpy as np

from ..utils import ConfigError, Singleton, log
from .simple import CropInputSimple, CropStateSimple, simple_fruit_yield, simple_step
from .tomgro import CropInputTomgro, CropStateTomgro, tomgro_fruit_dry, tomgro_step


class CropModel:
    """
    Uniform face of a crop model for the coupling, cost and I/O layers.

    ``params`` arguments are the bundled model parameters (anything with
    ``simple``, ``tomgro`` and ``smoothing`` attributes).
    """

    name: str
    state_cls: type
    input_cls: type
    # index of the fruit dry weight or of the quantity it is derived from
    fruit_index: int

    def step(self, x, u, params):
        raise NotImplementedError()

    def fruit_dry(self, x, params):
        raise NotImplementedError()

    def fruit_factor(self, params) -> float:
        """Fruit dry weight per unit of ``x[fruit_index]``."""
        raise NotImplementedError()

    def climate_input(self, T, T_d, R, C_CO2):
        """Crop input from daily climate quantities."""
        raise NotImplementedError()

    def fruit_fresh(self, x, params, dry_matter_fraction: float):
        return self.fruit_dry(x, params) / dry_matter_fraction

    def terminal_price_vector(self, params, economics) -> np.ndarray:
        """Euro per unit of each crop state component at the horizon."""
        q = np.zeros(len(self.state_cls._fields))
        q[self.fruit_index] = (
            economics.tomato_price
            * self.fruit_factor(params)
            / economics.dry_matter_fraction
        )
        return q

    def initial_state(self, section: Mapping[str, Any]):
        missing = [f for f in self.state_cls._fields if f not in section]
        if missing:
            raise ConfigError(f"initial.{self.name} is missing {missing}")
        return self.state_cls(*(float(section[f]) for f in self.state_cls._fields))

    def __repr__(self):
        return f"CropModel({self.name})"


class SimpleCrop(CropModel):
    name = "simple"
    state_cls = CropStateSimple
    input_cls = CropInputSimple
    fruit_index = 0

    def step(self, x, u, params):
        return simple_step(x, u, params.simple, params.smoothing)

    def fruit_dry(self, x, params):
        return simple_fruit_yield(x.m_B, params.simple)

    def fruit_factor(self, params) -> float:
        return params.simple.HI

    def climate_input(self, T, T_d, R, C_CO2):
        # irrigation keeps the crop free of drought in the greenhouse
        return CropInputSimple(T, 0.0, R, C_CO2)


class TomgroCrop(CropModel):
    name = "tomgro"
    state_cls = CropStateTomgro
    input_cls = CropInputTomgro
    fruit_index = 3

    def step(self, x, u, params):
        return tomgro_step(x, u, params.tomgro, params.smoothing)

    def fruit_dry(self, x, params):
        return tomgro_fruit_dry(x)

    def fruit_factor(self, params) -> float:
        return 1.0

    def climate_input(self, T, T_d, R, C_CO2):
        return CropInputTomgro(T, T_d, R, C_CO2)


@Singleton
class CropModelRegistry:
    def __init__(self):
        self.models: dict[str, CropModel] = {}

    def register(self, model: CropModel):
        log(5, f"[registry] crop model {model.name}\n")
        self.models[model.name] = model

    def get(self, name: str) -> CropModel:
        if name not in self.models:
            raise ConfigError(
                f"unknown crop model {name!r}, expected one of {sorted(self.models)}"
            )
        return self.models[name]

    def names(self) -> list[str]:
        return list(self.models)


CropModelRegistry().register(SimpleCrop())
CropModelRegistry().register(TomgroCrop())


def get_crop_model(name: str) -> CropModel:
    """
    Examples:
        >>> get_crop_model("simple").state_cls._fields
        ('m_B', 'tau', 'I50B')
    """
    return CropModelRegistry().get(name)


def crop_model_names() -> list[str]:
    return CropModelRegistry().names()
