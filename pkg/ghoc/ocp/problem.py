from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from ..coupling import HOURS_PER_DAY, CombinedState, ModelParams
from ..models.greenhouse import Disturbance, GhControl, check_state, control_bounds
from ..models.registry import get_crop_model
from ..utils import ConfigError, DivergenceError, DomainError, ParameterError, ShapeError

N_CONTROLS = len(GhControl._fields)
N_DISTURBANCES = len(Disturbance._fields)

SOLVER_METHODS = ("pgbb", "lbfgsb")
INIT_MODES = ("midpoint", "lower", "upper", "random")


@dataclass(frozen=True)
class Economics:
    tomato_price: float = 2.0  # euro/kg fresh
    co2_price: float = 0.15  # euro/kg
    heat_price: float = 0.02  # euro/kWh
    ventilation_price: float = 0.0  # euro per unit aperture and day
    dry_matter_fraction: float = 0.06

    def __post_init__(self):
        for name in ("tomato_price", "co2_price", "heat_price"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"economics.{name} must be > 0")
        if self.ventilation_price < 0:
            raise ParameterError("economics.ventilation_price must be >= 0")
        if not 0.0 < self.dry_matter_fraction <= 1.0:
            raise ParameterError("economics.dry_matter_fraction must lie in (0, 1]")

    @classmethod
    def from_config(cls, section: Mapping[str, Any]) -> Economics:
        return cls(**{k: float(v) for k, v in section.items()})


@dataclass(frozen=True)
class CostWeights:
    """
    ``r``: euro per unit of daily control (heating, ventilation, CO2).
    ``q``: euro per unit of each crop state component at the horizon.
    """

    r: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "r", np.asarray(self.r, dtype=float))
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float))
        if self.r.shape != (N_CONTROLS,):
            raise ShapeError(f"r must have {N_CONTROLS} entries, got shape {self.r.shape}")

    @classmethod
    def from_economics(
        cls, economics: Economics, params: ModelParams, model: str
    ) -> CostWeights:
        """
        Heating is priced through the pipe heating capacity (W/m2 at full
        valve) over 24 hours, CO2 through the injection capacity over
        86400 s; the fruit weight at the horizon is priced fresh.
        """
        gh = params.greenhouse
        r = [
            gh.heat_capacity / 1000.0 * HOURS_PER_DAY * economics.heat_price,
            economics.ventilation_price,
            gh.co2_capacity * 86400.0 * economics.co2_price,
        ]
        q = get_crop_model(model).terminal_price_vector(params, economics)
        return cls(np.array(r), q)


@dataclass(frozen=True)
class SolverConfig:
    method: str = "pgbb"
    tol: float = 1e-6
    max_iter: int = 2000
    armijo: float = 1e-4
    backtrack: float = 0.5
    max_backtracks: int = 30
    step_min: float = 1e-10
    step_max: float = 1e10
    init: str = "midpoint"
    seed: int = 0
    batch_size: int | None = None
    threads: int = 1

    def __post_init__(self):
        if self.method not in SOLVER_METHODS:
            raise ConfigError(f"solver.method must be one of {SOLVER_METHODS}, got {self.method!r}")
        if self.init not in INIT_MODES:
            raise ConfigError(f"solver.init must be one of {INIT_MODES}, got {self.init!r}")
        if not self.tol > 0 or self.max_iter < 1:
            raise ConfigError("solver.tol must be > 0 and solver.max_iter >= 1")
        if not (0 < self.armijo < 1 and 0 < self.backtrack < 1):
            raise ConfigError("solver.armijo and solver.backtrack must lie in (0, 1)")
        if not 0 < self.step_min <= self.step_max:
            raise ConfigError("solver.step_min must lie in (0, step_max]")
        if self.batch_size is not None and self.batch_size < 1:
            raise ConfigError("solver.batch_size must be >= 1")
        if self.threads < 1:
            raise ConfigError("solver.threads must be >= 1")

    @classmethod
    def from_config(cls, section: Mapping[str, Any], seed: int = 0) -> SolverConfig:
        values = dict(section)
        batch = values.pop("batch_size", None)
        return cls(
            method=str(values.pop("method", "pgbb")),
            tol=float(values.pop("tol", 1e-6)),
            max_iter=int(values.pop("max_iter", 2000)),
            armijo=float(values.pop("armijo", 1e-4)),
            backtrack=float(values.pop("backtrack", 0.5)),
            max_backtracks=int(values.pop("max_backtracks", 30)),
            step_min=float(values.pop("step_min", 1e-10)),
            step_max=float(values.pop("step_max", 1e10)),
            init=str(values.pop("init", "midpoint")),
            seed=int(seed),
            batch_size=None if batch is None else int(batch),
            threads=int(values.pop("threads", 1)),
        )


def _check_crop_state(crop, model: str):
    for name, value in zip(type(crop)._fields, crop):
        if not math.isfinite(float(value)):
            raise DomainError(f"initial {model} state {name} is not finite")
    negative = [n for n, v in zip(type(crop)._fields, crop) if float(v) < 0.0]
    if negative:
        raise DomainError(f"initial {model} state has negative components {negative}")


@dataclass(frozen=True)
class OcpProblem:
    """
    Economic-yield problem over ``N`` days: minimize
    ``sum_i r . u_i - q . crop_N`` over daily controls in the box of
    :func:`control_bounds`, starting from ``x_init``.
    """

    N: int
    x_init: CombinedState
    weights: CostWeights
    disturbances: np.ndarray  # (N, 24, 6)
    params: ModelParams
    economics: Economics = field(default_factory=Economics)
    days: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.N < 1:
            raise ShapeError(f"horizon N must be >= 1, got {self.N}")
        disturbances = np.asarray(self.disturbances, dtype=float)
        expected = (self.N, HOURS_PER_DAY, N_DISTURBANCES)
        if disturbances.shape != expected:
            raise ShapeError(f"disturbances must have shape {expected}, got {disturbances.shape}")
        object.__setattr__(self, "disturbances", disturbances)
        crop_model = get_crop_model(self.x_init.model)
        if self.weights.q.shape != (len(crop_model.state_cls._fields),):
            raise ShapeError(
                f"q must have one entry per {self.model} state component, got shape {self.weights.q.shape}"
            )
        _check_crop_state(self.x_init.crop, self.model)
        try:
            for h in self.x_init.gh_hours:
                check_state(h, self.params.greenhouse)
        except DivergenceError as e:
            raise DomainError(f"infeasible initial greenhouse state: {e.message}") from e
        days = tuple(
            tuple(Disturbance(*map(float, row)) for row in day) for day in disturbances
        )
        object.__setattr__(self, "days", days)

    @property
    def model(self) -> str:
        return self.x_init.model

    @property
    def n_vars(self) -> int:
        return self.N * N_CONTROLS

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Flat lower and upper bounds of the day-major control vector."""
        lo = np.array([b[0] for b in control_bounds()] * self.N)
        hi = np.array([b[1] for b in control_bounds()] * self.N)
        return lo, hi

    def controls(self, U) -> list[GhControl]:
        """Daily controls from a flat ``(3N,)`` or an ``(N, 3)`` array."""
        duals = _has_duals(U)
        U = np.asarray(U, dtype=object if duals else float)
        if U.size != self.n_vars:
            raise ShapeError(f"expected {self.n_vars} control values for N={self.N}, got {U.size}")
        U = U.reshape(self.N, N_CONTROLS)
        if duals:
            return [GhControl(*row) for row in U]
        return [GhControl(*(float(v) for v in row)) for row in U]


def _has_duals(U) -> bool:
    arr = np.asarray(U, dtype=object).ravel()
    return any(not np.isscalar(v) for v in arr)
