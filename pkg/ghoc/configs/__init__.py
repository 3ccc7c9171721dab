"""
Packaged default parameter rows.

``defaults.yaml`` is the single source of the tomato SIMPLE row, the reduced
TOMGRO coefficients, the greenhouse coefficients, economics and solver
settings. Scenario files are merged over it by :mod:`ghoc.scenario.config`.
"""

from __future__ import annotations

import copy
import os
from functools import lru_cache
from typing import Any

import yaml

from ..models.greenhouse import GhParams
from ..models.simple import SimpleParams
from ..models.tomgro import TomgroParams

DEFAULTS_PATH = os.path.join(os.path.dirname(__file__), "defaults.yaml")


@lru_cache(maxsize=None)
def _read_defaults() -> dict[str, Any]:
    with open(DEFAULTS_PATH) as fp:
        return yaml.safe_load(fp)


def load_defaults() -> dict[str, Any]:
    """A fresh deep copy of the packaged defaults."""
    return copy.deepcopy(_read_defaults())


def default_simple_params() -> SimpleParams:
    return SimpleParams.from_config(_read_defaults()["simple"])


def default_tomgro_params() -> TomgroParams:
    return TomgroParams.from_config(_read_defaults()["tomgro"])


def default_gh_params() -> GhParams:
    return GhParams.from_config(_read_defaults()["greenhouse"])
