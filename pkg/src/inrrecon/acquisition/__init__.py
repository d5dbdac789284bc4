"""Acquisition physics: masks, coil maps, phantom and the encoding operator."""

from .coils import estimate_sensitivities, normalize_maps, rss, synth_sensitivities
from .encoding import AcquisitionModel, apply_E, apply_EH, simulate_acquisition
from .masks import PATTERNS, SamplingMask, gen_mask
from .phantom import shepp_logan
from .scenario import MAP_SOURCES, Scenario, ScenarioSpec, build_scenario

__all__ = [
    "AcquisitionModel",
    "MAP_SOURCES",
    "PATTERNS",
    "SamplingMask",
    "Scenario",
    "ScenarioSpec",
    "apply_E",
    "apply_EH",
    "build_scenario",
    "estimate_sensitivities",
    "gen_mask",
    "normalize_maps",
    "rss",
    "shepp_logan",
    "simulate_acquisition",
    "synth_sensitivities",
]
