from .greenhouse import (
    Disturbance,
    GhControl,
    GhParams,
    GhState,
    check_control,
    control_bounds,
    gh_step,
    is_admissible,
    saturation_concentration,
)
from .registry import CropModel, crop_model_names, get_crop_model
from .simple import (
    CropInputSimple,
    CropStateSimple,
    SimpleParams,
    biomass_gain,
    simple_fruit_yield,
    simple_step,
)
from .tomgro import (
    CropInputTomgro,
    CropStateTomgro,
    TomgroParams,
    ppfd_from_radiation,
    tomgro_step,
)

__all__ = [
    "CropStateSimple",
    "CropInputSimple",
    "SimpleParams",
    "simple_step",
    "simple_fruit_yield",
    "biomass_gain",
    "CropStateTomgro",
    "CropInputTomgro",
    "TomgroParams",
    "ppfd_from_radiation",
    "tomgro_step",
    "GhState",
    "GhControl",
    "Disturbance",
    "GhParams",
    "gh_step",
    "control_bounds",
    "check_control",
    "is_admissible",
    "saturation_concentration",
    "CropModel",
    "get_crop_model",
    "crop_model_names",
]
