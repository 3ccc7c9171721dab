"""
Reduced TOMGRO crop model, daily step.

Five states: main stem nodes ``N``, leaf area index ``LAI``, total dry weight
``W``, fruit dry weight ``W_f`` and mature fruit dry weight ``W_m``. States
carry kg/m2; the growth equations run in g/m2 because the smoothing
constants are absolute and would swamp kg-scale increments.

Thresholds of the original description (fruit set at node ``N_FF``,
maturation from node ``N_FF + k_F``, the LAI ceiling, the 350 ppm CO2 knee)
are realized with ``soft_heaviside``; the clipped rate functions with
``soft_max``/``soft_min``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import Any, Mapping, NamedTuple

from ..diff.dual import value_of
from ..diff.ops import exp, log
from ..smoothing import SmoothingParams, soft_clip, soft_heaviside, soft_max, soft_min
from ..utils import DomainError, NumericInputError, ParameterError

# MJ/m2/day of white light per umol/m2/s of PPFD
PPFD_CONVERSION = 0.037

OUTPUT_MODES = ("raw", "floored")


class CropStateTomgro(NamedTuple):
    N: Any  # main stem nodes
    LAI: Any  # m2/m2
    W: Any  # total dry weight, kg/m2
    W_f: Any  # fruit dry weight, kg/m2
    W_m: Any  # mature fruit dry weight, kg/m2


class CropInputTomgro(NamedTuple):
    T: Any  # whole-day mean temperature, degC
    T_d: Any  # daytime mean temperature, degC
    R: Any  # radiation, MJ/m2/day
    C_CO2: Any  # ppm


@dataclass(frozen=True)
class TomgroParams:
    # node development
    N_m: float = 0.5  # max node development rate, nodes/day
    # leaf area expansion
    rho: float = 3.1  # plants/m2
    delta: float = 0.038  # max leaf area expansion per node, m2/node
    beta: float = 0.169  # coefficient of the expolinear LAI function
    N_b: float = 16.0  # inflexion node of the expolinear LAI function
    LAI_max: float = 4.0
    # photosynthesis
    tau1: float = 0.0693  # leaf CO2 slope up to co2_knee, umol CO2/m2/s/ppm
    tau2: float = 0.0693  # leaf CO2 slope above co2_knee
    co2_knee: float = 350.0  # ppm
    D: float = 2.593  # conversion umol CO2/m2/s -> g CH2O/m2/day
    K: float = 0.58  # light extinction coefficient
    m: float = 0.1  # leaf light transmission coefficient
    Q_e: float = 0.0645  # leaf quantum efficiency, umol CO2/umol photon
    # respiration and partitioning
    Q10: float = 1.4
    r_m: float = 0.016  # maintenance respiration, g CH2O/g DM/day at 20 degC
    E: float = 0.717  # growth efficiency, g DM/g CH2O
    # fruit
    N_FF: float = 22.0  # nodes per plant when the first fruit appears
    alpha_F: float = 0.8  # max partitioning of new growth to fruit
    v: float = 0.135  # transition coefficient between vegetative and full fruit growth
    T_crit: float = 24.4  # mean daytime temperature above which fruit abortion starts
    k_F: float = 5.0  # nodes between first fruit and first mature fruit
    D_F_max: float = 0.024  # max fruit development rate, 1/day
    p1: float = 2.0  # leaf loss per node above LAI_max, g/node
    # root fraction fR = max(fR_a - fR_b * N, fR_min)
    fR_a: float = 0.2034
    fR_b: float = 0.0046
    fR_min: float = 0.07
    output_mode: str = "raw"

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "output_mode":
                continue
            if not math.isfinite(value):
                raise ParameterError(f"tomgro.{f.name} must be finite, got {value!r}")
        if self.output_mode not in OUTPUT_MODES:
            raise ParameterError(
                f"tomgro.output_mode must be one of {OUTPUT_MODES}, got {self.output_mode!r}"
            )
        for name in (
            "N_m", "rho", "delta", "beta", "LAI_max", "D", "K", "Q_e",
            "Q10", "r_m", "E", "alpha_F", "D_F_max", "co2_knee",
        ):
            if not getattr(self, name) > 0:
                raise ParameterError(f"tomgro.{name} must be > 0")
        for name in ("tau1", "tau2", "p1", "v", "fR_min", "k_F"):
            if getattr(self, name) < 0:
                raise ParameterError(f"tomgro.{name} must be >= 0")
        if not 0.0 < self.m < 1.0:
            raise ParameterError("tomgro.m must lie in (0, 1)")
        if not self.E <= 1.0:
            raise ParameterError("tomgro.E must be <= 1")

    @classmethod
    def from_config(cls, section: Mapping[str, Any]) -> TomgroParams:
        values = {
            k: (str(v) if k == "output_mode" else float(v)) for k, v in section.items()
        }
        return cls(**values)

    def with_mode(self, mode: str) -> TomgroParams:
        return replace(self, output_mode=mode)


def ppfd_from_radiation(R):
    """
    Daily radiation (MJ/m2/day) to photosynthetic photon flux density
    (umol/m2/s) for white light.

    Examples:
        >>> ppfd_from_radiation(0.0)
        0.0
        >>> ppfd_from_radiation(0.037)
        1.0
    """
    if value_of(R) < 0.0:
        raise DomainError(f"radiation R must be >= 0, got {value_of(R)}")
    return R / PPFD_CONVERSION


def _check_input(u: CropInputTomgro):
    for name, value in zip(CropInputTomgro._fields, u):
        if not math.isfinite(value_of(value)):
            raise NumericInputError(f"tomgro input {name} is not finite: {value_of(value)!r}")
    if value_of(u.C_CO2) <= 0.0:
        raise DomainError(f"CO2 concentration must be > 0, got {value_of(u.C_CO2)}")


def node_rate(T, p: TomgroParams, s: SmoothingParams):
    """Daily node development ``N_m * fN(T)``; zero forcing gives a near-zero rate."""
    f_n = soft_clip(
        soft_min(0.25 + 0.025 * T, 2.5 - 0.05 * T, s.mu), 0.0, 1.0, s.mu
    )
    return p.N_m * f_n


def gross_photosynthesis(LAI_g, u: CropInputTomgro, p: TomgroParams, s: SmoothingParams):
    """Canopy gross photosynthesis, g CH2O/m2/day."""
    mu = s.mu
    # leaf light-saturated rate with a CO2 knee
    above = soft_max(u.C_CO2 - p.co2_knee, 0.0, mu)
    lf_max = p.tau1 * u.C_CO2 + (p.tau2 - p.tau1) * above
    lf_max = soft_max(lf_max, 0.0, mu)
    pg_red = soft_min(
        1.0 / (1.0 + 9.0 * exp(-0.5 * (u.T_d - 10.0))),
        1.0 - 1.0 / (1.0 + 9.0 * exp(-0.5 * (u.T_d - 35.0))),
        mu,
    )
    pg_red = soft_max(pg_red, 0.0, mu)
    light = p.Q_e * p.K * ppfd_from_radiation(u.R)
    top = (1.0 - p.m) * lf_max + light
    bottom = (1.0 - p.m) * lf_max + light * exp(-p.K * LAI_g)
    return p.D * lf_max * pg_red / p.K * log(top / bottom)


def tomgro_step(
    x: CropStateTomgro, u: CropInputTomgro, p: TomgroParams, s: SmoothingParams
) -> CropStateTomgro:
    """
    Advance the reduced TOMGRO state by one day.

    ``p.output_mode == "floored"`` floors the three weights at zero with
    ``soft_max``; ``"raw"`` keeps the smoothed dynamics as they are.
    """
    _check_input(u)
    mu, eps = s.mu, s.epsilon

    d_n = node_rate(u.T, p, s)

    # leaf area; expansion stops above the LAI ceiling
    lam = soft_clip((45.0 - u.T_d) / 10.0, 0.0, 1.0, mu)
    above_ceiling = soft_heaviside(x.LAI - p.LAI_max, eps)
    d_lai = (
        p.rho * p.delta * lam
        * exp(p.beta * (x.N - p.N_b)) / (1.0 + exp(p.beta * (x.N - p.N_b)))
        * d_n * (1.0 - above_ceiling)
    )

    # carbon balance in grams
    w_g = x.W * 1000.0
    wf_g = x.W_f * 1000.0
    wm_g = x.W_m * 1000.0
    pg = gross_photosynthesis(x.LAI, u, p, s)
    r_m = p.Q10 ** ((u.T - 20.0) / 10.0) * p.r_m * (w_g - wm_g)
    f_root = soft_max(p.fR_a - p.fR_b * x.N, p.fR_min, mu)
    gr_net = soft_max(p.E * (pg - r_m) * (1.0 - f_root), 0.0, mu)

    fruiting = soft_heaviside(x.N - p.N_FF, eps)
    f_f = soft_clip(0.0625 * (u.T - 8.0), 0.0, 1.0, mu)
    g_td = soft_clip(1.0 - 0.154 * (u.T_d - p.T_crit), 0.09, 1.0, mu)
    d_wf = (
        gr_net * p.alpha_F * f_f
        * (1.0 - exp(-p.v * (x.N - p.N_FF)))
        * g_td * fruiting
    )

    maturing = soft_heaviside(x.N - (p.N_FF + p.k_F), eps)
    d_f = soft_clip(0.0714 * (u.T - 9.0), 0.0, 1.0, mu)
    d_wm = p.D_F_max * d_f * (wf_g - wm_g) * maturing

    leaf_loss = p.p1 * above_ceiling
    d_w = soft_min(
        gr_net - leaf_loss * p.rho * d_n,
        d_wf + (8.0 - leaf_loss) * p.rho * d_n,
        mu,
    )

    w_next = w_g + d_w
    wf_next = wf_g + d_wf
    wm_next = wm_g + d_wm
    if p.output_mode == "floored":
        w_next = soft_max(w_next, 0.0, mu)
        wf_next = soft_max(wf_next, 0.0, mu)
        wm_next = soft_max(wm_next, 0.0, mu)

    return CropStateTomgro(
        x.N + d_n,
        x.LAI + d_lai,
        w_next / 1000.0,
        wf_next / 1000.0,
        wm_next / 1000.0,
    )


def tomgro_fruit_dry(x: CropStateTomgro):
    return x.W_f
