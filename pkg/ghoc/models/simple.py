"""
SIMPLE crop model, daily step.

Biomass grows with intercepted radiation, scaled by temperature, heat, CO2
and drought response factors; canopy interception follows thermal time
with a logistic rise (I50A) and a logistic senescence (I50B) phase, and heat
or drought stress pull senescence forward by raising I50B.

Every switch of the published piecewise functions is replaced by the
smoothing primitives, so the step is differentiable in state and input.
The CO2 factor saturates through a Heaviside gate instead of a soft minimum:
above ``co2_saturation + 37 / epsilon`` ppm the gate evaluates to exactly 1.0
and the factor, and its derivative, no longer depend on CO2. A second gate
holds the factor at 1 under ``co2_reference``, where the published response
is not defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Any, Mapping, NamedTuple

from ..diff.dual import value_of
from ..diff.ops import exp
from ..smoothing import (
    SmoothingParams,
    soft_clip,
    soft_heaviside,
    soft_max,
    soft_min,
)
from ..utils import DomainError, NumericInputError, ParameterError

# default harvest index of tomato
TOMATO_HARVEST_INDEX = 0.68


class CropStateSimple(NamedTuple):
    m_B: Any  # biomass, kg/m2
    tau: Any  # cumulative temperature, degC day
    I50B: Any  # senescence thermal time, degC day


class CropInputSimple(NamedTuple):
    T: Any  # mean daily temperature, degC
    D: Any  # relative drought in [0, 1]
    R: Any  # radiation, MJ/m2/day
    C_CO2: Any  # ppm


@dataclass(frozen=True)
class SimpleParams:
    T_sum: float  # thermal time to maturity, degC day
    I50A: float  # thermal time to 50 % interception during growth, degC day
    I50B: float  # initial thermal time to 50 % interception at senescence
    T_base: float  # degC
    T_opt: float  # degC
    RUE: float  # radiation use efficiency, g/MJ
    I50maxH: float  # max daily I50B increase from heat stress
    I50maxW: float  # max daily I50B increase from drought stress
    T_heat: float  # heat stress threshold, degC
    T_ext: float  # extreme heat, zero growth, degC
    S_CO2: float  # relative RUE increase per ppm above co2_reference
    S_water: float  # drought sensitivity
    fsolar_max: float
    co2_reference: float  # ppm
    co2_saturation: float  # ppm
    t_max_offset: float  # T_max proxy = T + offset, degC
    HI: float = TOMATO_HARVEST_INDEX

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value):
                raise ParameterError(f"simple.{f.name} must be finite, got {value!r}")
        if not 0.0 < self.HI <= 1.0:
            raise ParameterError(f"simple.HI must lie in (0, 1], got {self.HI}")
        if not self.T_base < self.T_opt:
            raise ParameterError("simple.T_base must be below simple.T_opt")
        if not self.T_heat < self.T_ext:
            raise ParameterError("simple.T_heat must be below simple.T_ext")
        if not 0.0 < self.fsolar_max <= 1.0:
            raise ParameterError("simple.fsolar_max must lie in (0, 1]")
        if not self.co2_reference < self.co2_saturation:
            raise ParameterError("simple.co2_reference must be below simple.co2_saturation")
        for name in ("T_sum", "I50A", "RUE", "I50maxH", "I50maxW", "S_CO2", "S_water"):
            if getattr(self, name) < 0:
                raise ParameterError(f"simple.{name} must be >= 0")
        if self.I50B < 0:
            raise ParameterError("simple.I50B must be >= 0")

    @classmethod
    def from_config(cls, section: Mapping[str, Any]) -> SimpleParams:
        return cls(**{k: float(v) for k, v in section.items()})


def _check_input(u: CropInputSimple):
    for name, value in zip(CropInputSimple._fields, u):
        if not math.isfinite(value_of(value)):
            raise NumericInputError(f"simple input {name} is not finite: {value_of(value)!r}")
    if not 0.0 <= value_of(u.D) <= 1.0:
        raise DomainError(f"drought level D must lie in [0, 1], got {value_of(u.D)}")
    if value_of(u.R) < 0.0:
        raise DomainError(f"radiation R must be >= 0, got {value_of(u.R)}")
    if value_of(u.C_CO2) <= 0.0:
        raise DomainError(f"CO2 concentration must be > 0, got {value_of(u.C_CO2)}")


def response_factors(
    x: CropStateSimple, u: CropInputSimple, p: SimpleParams, s: SmoothingParams
) -> dict[str, Any]:
    """Smoothed SIMPLE response factors for one day, keyed by name."""
    mu = s.mu
    rise = p.fsolar_max / (1.0 + exp(-0.01 * (x.tau - p.I50A)))
    fall = p.fsolar_max / (1.0 + exp(0.01 * (x.tau - (p.T_sum - x.I50B))))
    f_solar = soft_max(soft_min(rise, fall, mu), 0.0, mu)

    f_temp = soft_clip((u.T - p.T_base) / (p.T_opt - p.T_base), 0.0, 1.0, mu)

    t_max = u.T + p.t_max_offset
    f_heat = soft_clip(
        1.0 - (t_max - p.T_heat) / (p.T_ext - p.T_heat), 0.0, 1.0, mu
    )

    excess = u.C_CO2 - p.co2_saturation
    below = excess * (1.0 - soft_heaviside(excess, s.epsilon))
    # no penalty under the reference concentration
    lift = p.co2_saturation - p.co2_reference + below
    f_co2 = 1.0 + p.S_CO2 * lift * soft_heaviside(lift, s.epsilon)

    f_water = soft_clip(1.0 - p.S_water * u.D, 0.0, 1.0, mu)
    return {
        "f_solar": f_solar,
        "f_temp": f_temp,
        "f_heat": f_heat,
        "f_co2": f_co2,
        "f_water": f_water,
    }


def _gain(u: CropInputSimple, p: SimpleParams, s: SmoothingParams, f: dict):
    stress = soft_max(soft_min(f["f_heat"], f["f_water"], s.mu), 0.0, s.mu)
    return u.R * f["f_solar"] * (p.RUE * 1e-3) * f["f_co2"] * f["f_temp"] * stress


def biomass_gain(
    x: CropStateSimple, u: CropInputSimple, p: SimpleParams, s: SmoothingParams
):
    """One-day biomass increment, kg/m2. Never negative."""
    return _gain(u, p, s, response_factors(x, u, p, s))


def simple_step(
    x: CropStateSimple, u: CropInputSimple, p: SimpleParams, s: SmoothingParams
) -> CropStateSimple:
    """
    Advance the SIMPLE state by one day.

    Examples:
        >>> from ghoc.configs import default_simple_params
        >>> p = default_simple_params()
        >>> x = CropStateSimple(0.0, 0.0, p.I50B)
        >>> y = simple_step(x, CropInputSimple(20.0, 0.0, 0.0, 400.0), p, SmoothingParams())
        >>> y.m_B
        0.0
    """
    _check_input(u)
    f = response_factors(x, u, p, s)
    gain = _gain(u, p, s, f)
    d_tt = soft_max(u.T - p.T_base, 0.0, s.mu)
    d_i50b = p.I50maxH * (1.0 - f["f_heat"]) + p.I50maxW * (1.0 - f["f_water"])
    return CropStateSimple(x.m_B + gain, x.tau + d_tt, x.I50B + d_i50b)


def simple_fruit_yield(m_B_final, p: SimpleParams):
    """
    Dry fruit weight ``HI * m_B``, kg/m2.

    Examples:
        >>> from ghoc.configs import default_simple_params
        >>> simple_fruit_yield(10.0, default_simple_params())
        6.800000000000001
    """
    if value_of(m_B_final) < 0.0:
        raise DomainError(f"biomass must be >= 0, got {value_of(m_B_final)}")
    return p.HI * m_B_final
