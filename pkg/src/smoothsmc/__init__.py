"""Smooth sliding mode control for n-th order uncertain nonlinear plants,
with numerical checks of its reaching and steady-state error guarantees."""

from .bounds import ConvergenceRegion, ZetaTable, contains, region, slotine_region, zeta_table
from .controller import (ControlDiagnostics, ControllerConfig, DesiredState, UncertaintyModel,
                         control, equivalent_control, robust_gain)
from .smoothing import SmoothingKind, sign_fn
from .surface import (SurfaceSpec, binomial_coefficients, boundary_distance, make_surface,
                      surface_rate, surface_value)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceRegion", "ZetaTable", "contains", "region", "slotine_region", "zeta_table",
    "ControlDiagnostics", "ControllerConfig", "DesiredState", "UncertaintyModel",
    "control", "equivalent_control", "robust_gain",
    "SmoothingKind", "sign_fn",
    "SurfaceSpec", "binomial_coefficients", "boundary_distance", "make_surface",
    "surface_rate", "surface_value",
]
