"""Python bindings for the tomokl tomography denoising library."""

from ._tomokl import (
    FanGeometry,
    ParallelGeometry,
    UndefinedSnr,
    add_poisson,
    default_fan_geometry,
    default_parallel_geometry,
    denoise,
    fan_project,
    frobenius_error,
    kl_prox,
    parallel_project,
    reconstruct_fan,
    shepp_logan,
    singular_direction_fraction,
    snr,
)

__all__ = [
    "FanGeometry",
    "ParallelGeometry",
    "UndefinedSnr",
    "add_poisson",
    "default_fan_geometry",
    "default_parallel_geometry",
    "denoise",
    "fan_project",
    "frobenius_error",
    "kl_prox",
    "parallel_project",
    "reconstruct_fan",
    "shepp_logan",
    "singular_direction_fraction",
    "snr",
]
