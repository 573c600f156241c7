"""Data-driven bandwidth selection by pairwise estimator comparison."""

from ._core import (
    DensitySpec,
    EmptyGrid,
    IllPosedModel,
    InvalidParameter,
    NoiseSpec,
    OutOfValidity,
    ProductKernel,
    UnsupportedOperation,
    dyadic_grid,
    kde,
    nikolskii_check,
    sample_contaminated,
    select,
    sobolev_check,
    theoretical_rate,
)

__all__ = [
    "DensitySpec",
    "EmptyGrid",
    "IllPosedModel",
    "InvalidParameter",
    "NoiseSpec",
    "OutOfValidity",
    "ProductKernel",
    "UnsupportedOperation",
    "dyadic_grid",
    "kde",
    "nikolskii_check",
    "sample_contaminated",
    "select",
    "sobolev_check",
    "theoretical_rate",
]
