"""
Lumped greenhouse climate model on an hourly grid.

The air, soil and heating pipe energy balances and the CO2 and water vapour
mass balances are integrated with explicit Euler sub-steps inside one
:func:`gh_step` call. The only nonsmooth exchange terms are the temperature
difference driving buoyancy ventilation (``soft_abs``) and the
evaporation/condensation deficits (``soft_max``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import Any, Mapping, NamedTuple

from ..diff.dual import value_of
from ..diff.ops import exp
from ..smoothing import SmoothingParams, soft_abs, soft_max
from ..utils import ConstraintError, DivergenceError, DomainError, NumericInputError, ParameterError

SECONDS_PER_HOUR = 3600.0
CONTROL_TOLERANCE = 1e-9


class GhState(NamedTuple):
    T_g: Any  # air temperature, degC
    T_s: Any  # soil temperature, degC
    T_p: Any  # heating pipe temperature, degC
    C_CO2: Any  # ppm
    C_H2O: Any  # kg/m3


class GhControl(NamedTuple):
    u_q: Any  # heating valve position, [0, 1]
    u_v: Any  # window aperture, windward plus lee, [0, 2]
    u_co2: Any  # CO2 valve position, [0, 1]


class Disturbance(NamedTuple):
    R_out: Any  # W/m2
    T_out: Any  # degC
    v: Any  # wind speed, m/s
    T_soil: Any  # subsoil temperature, degC
    C_H2O_out: Any  # kg/m3
    C_CO2_out: Any  # ppm


def control_bounds() -> tuple[tuple[float, float], ...]:
    """
    Box bounds of ``(u_q, u_v, u_co2)``.

    Examples:
        >>> control_bounds()
        ((0.0, 1.0), (0.0, 2.0), (0.0, 1.0))
    """
    return ((0.0, 1.0), (0.0, 2.0), (0.0, 1.0))


def is_admissible(u: GhControl, tol: float = CONTROL_TOLERANCE) -> bool:
    """
    Examples:
        >>> is_admissible(GhControl(1.0, 2.0, 1.0))
        True
        >>> is_admissible(GhControl(0.0, 2.1, 0.0))
        False
    """
    return all(
        lo - tol <= value_of(value) <= hi + tol
        for value, (lo, hi) in zip(u, control_bounds())
    )


def check_control(u: GhControl):
    for name, value, (lo, hi) in zip(GhControl._fields, u, control_bounds()):
        v = value_of(value)
        if not math.isfinite(v):
            raise NumericInputError(f"control {name} is not finite: {v!r}")
        if not lo - CONTROL_TOLERANCE <= v <= hi + CONTROL_TOLERANCE:
            raise ConstraintError(
                f"control {name}={v} outside [{lo}, {hi}]", component=name, value=v
            )


def check_disturbance(d: Disturbance):
    for name, value in zip(Disturbance._fields, d):
        if not math.isfinite(value_of(value)):
            raise NumericInputError(f"disturbance {name} is not finite: {value_of(value)!r}")
    if value_of(d.R_out) < 0.0:
        raise DomainError(f"outside radiation must be >= 0, got {value_of(d.R_out)}")
    if value_of(d.v) < 0.0:
        raise DomainError(f"wind speed must be >= 0, got {value_of(d.v)}")
    if value_of(d.C_H2O_out) <= 0.0 or value_of(d.C_CO2_out) <= 0.0:
        raise DomainError("outside concentrations must be > 0")


def saturation_concentration(T):
    """
    Water vapour concentration at saturation, kg/m3, at temperature ``T`` degC.

    Examples:
        >>> round(saturation_concentration(20.0) * 1000, 1)
        17.2
    """
    return 0.0021668 * 610.78 * exp(17.2694 * T / (T + 238.3)) / (T + 273.15)


@dataclass(frozen=True)
class GhParams:
    # heat capacities, J/m2/K
    cap_air: float = 3.0e4
    cap_soil: float = 5.0e5
    cap_pipe: float = 1.0e4
    # heat transfer coefficients, W/m2/K
    k_cover: float = 6.1
    k_air_soil: float = 5.75
    k_soil_subsoil: float = 1.5
    k_pipe_air: float = 7.5
    heat_capacity: float = 120.0  # heating power at full valve, W/m2
    solar_to_air: float = 0.2  # fraction of R_out heating the air
    solar_to_soil: float = 0.3  # fraction of R_out heating the soil
    height: float = 4.0  # mean greenhouse height, m
    # ventilation, m3/m2/s
    leakage: float = 1.0e-4
    vent_wind: float = 5.0e-4  # per unit aperture and m/s wind
    vent_buoyancy: float = 1.0e-4  # per unit aperture and K difference
    co2_capacity: float = 1.0e-6  # CO2 injection at full valve, kg/m2/s
    co2_density: float = 1.83e-6  # kg/m3 per ppm
    evaporation: float = 1.0e-3  # m/s
    condensation: float = 2.0e-3  # m/s
    rho_cp_air: float = 1200.0  # J/m3/K
    substeps: int = 60
    t_min: float = -20.0
    t_max: float = 80.0
    # crop sink terms, used only with crop_feedback
    crop_feedback: bool = False
    crop_co2_uptake: float = 2.0e-9  # kg/m2/s per W/m2
    crop_co2_half: float = 300.0  # ppm
    crop_transpiration: float = 2.0e-8  # kg/m2/s per W/m2

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "crop_feedback":
                continue
            if not math.isfinite(value):
                raise ParameterError(f"greenhouse.{f.name} must be finite, got {value!r}")
        for name in ("cap_air", "cap_soil", "cap_pipe", "height", "co2_density", "rho_cp_air"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"greenhouse.{name} must be > 0")
        for f in fields(self):
            if f.name in ("t_min", "t_max", "crop_feedback"):
                continue
            if getattr(self, f.name) < 0:
                raise ParameterError(f"greenhouse.{f.name} must be >= 0")
        if int(self.substeps) != self.substeps or self.substeps < 1:
            raise ParameterError(f"greenhouse.substeps must be a positive integer, got {self.substeps}")
        if not self.t_min < self.t_max:
            raise ParameterError("greenhouse.t_min must be below greenhouse.t_max")

    @classmethod
    def from_config(cls, section: Mapping[str, Any]) -> GhParams:
        values: dict[str, Any] = {}
        for key, value in section.items():
            if key == "crop_feedback":
                values[key] = bool(value)
            elif key == "substeps":
                values[key] = int(value)
            else:
                values[key] = float(value)
        return cls(**values)

    def frozen(self) -> GhParams:
        """Parameters under which :func:`gh_step` returns its input state."""
        return replace(
            self,
            k_cover=0.0,
            k_air_soil=0.0,
            k_soil_subsoil=0.0,
            k_pipe_air=0.0,
            heat_capacity=0.0,
            solar_to_air=0.0,
            solar_to_soil=0.0,
            leakage=0.0,
            vent_wind=0.0,
            vent_buoyancy=0.0,
            co2_capacity=0.0,
            evaporation=0.0,
            condensation=0.0,
            crop_feedback=False,
        )


def ventilation_rate(x: GhState, u: GhControl, d: Disturbance, p: GhParams, s: SmoothingParams):
    """Air exchange with the outside, m3/m2/s."""
    return p.leakage + u.u_v * (
        p.vent_wind * d.v + p.vent_buoyancy * soft_abs(x.T_g - d.T_out, s.mu)
    )


def derivatives(
    x: GhState, u: GhControl, d: Disturbance, p: GhParams, s: SmoothingParams
) -> GhState:
    """Time derivatives of the greenhouse state, per second."""
    mu = s.mu
    phi = ventilation_rate(x, u, d, p, s)

    q_pipe_air = p.k_pipe_air * (x.T_p - x.T_g)
    q_air_soil = p.k_air_soil * (x.T_g - x.T_s)
    q_out = (p.k_cover + p.rho_cp_air * phi) * (x.T_g - d.T_out)
    dT_g = (q_pipe_air - q_air_soil - q_out + p.solar_to_air * d.R_out) / p.cap_air
    dT_s = (
        q_air_soil
        - p.k_soil_subsoil * (x.T_s - d.T_soil)
        + p.solar_to_soil * d.R_out
    ) / p.cap_soil
    dT_p = (u.u_q * p.heat_capacity - q_pipe_air) / p.cap_pipe

    co2_in = u.u_co2 * p.co2_capacity
    h2o_in = 0.0
    if p.crop_feedback:
        co2_in = co2_in - p.crop_co2_uptake * d.R_out * x.C_CO2 / (x.C_CO2 + p.crop_co2_half)
        h2o_in = p.crop_transpiration * d.R_out
    dC = co2_in / (p.height * p.co2_density) - phi / p.height * (x.C_CO2 - d.C_CO2_out)

    # deficits in g/m3 so the absolute smoothing constant stays small
    t_cover = (x.T_g + d.T_out) / 2.0
    evap_deficit = soft_max((saturation_concentration(x.T_g) - x.C_H2O) * 1000.0, 0.0, mu)
    cond_excess = soft_max((x.C_H2O - saturation_concentration(t_cover)) * 1000.0, 0.0, mu)
    evap = p.evaporation * evap_deficit / 1000.0 + h2o_in
    cond = p.condensation * cond_excess / 1000.0
    dH = (evap - cond) / p.height - phi / p.height * (x.C_H2O - d.C_H2O_out)
    return GhState(dT_g, dT_s, dT_p, dC, dH)


def check_state(x: GhState, p: GhParams):
    for name, value in zip(GhState._fields, x):
        v = value_of(value)
        if not math.isfinite(v):
            raise DivergenceError(f"greenhouse state {name} is not finite", name, v)
    for name in ("T_g", "T_s", "T_p"):
        v = value_of(getattr(x, name))
        if not p.t_min <= v <= p.t_max:
            raise DivergenceError(
                f"greenhouse state {name}={v:.6g} left the band [{p.t_min}, {p.t_max}] degC",
                name,
                v,
            )
    if value_of(x.C_CO2) <= 0.0:
        raise DivergenceError("CO2 concentration dropped to zero", "C_CO2", value_of(x.C_CO2))
    if value_of(x.C_H2O) < 0.0:
        raise DivergenceError(
            "water vapour concentration went negative", "C_H2O", value_of(x.C_H2O)
        )


def gh_step(
    x: GhState, u: GhControl, d: Disturbance, p: GhParams, s: SmoothingParams
) -> GhState:
    """
    Advance the greenhouse state by one hour under constant control and
    disturbance.

    Examples:
        >>> p = GhParams().frozen()
        >>> x = GhState(20.0, 18.0, 40.0, 600.0, 0.01)
        >>> d = Disturbance(0.0, 5.0, 2.0, 10.0, 0.005, 400.0)
        >>> gh_step(x, GhControl(1.0, 1.0, 1.0), d, p, SmoothingParams()) == x
        True
    """
    check_control(u)
    check_disturbance(d)
    dt = SECONDS_PER_HOUR / p.substeps
    for _ in range(p.substeps):
        rate = derivatives(x, u, d, p, s)
        x = GhState(*(xi + dt * ri for xi, ri in zip(x, rate)))
        check_state(x, p)
    return x
