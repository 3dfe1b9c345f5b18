"""Sliding mode control law with robust switching gain.

The applied input is

    u = u_eq - K * sw(s, phi),
    u_eq = (-f_hat(x) + xd^(n) - cbar . e) / b_hat,
    K    = beta / b_hat * (eta + F(x)) + (beta - 1) * |u_eq|,

where ``sw`` is one of the :mod:`smoothsmc.smoothing` functions. K is
re-evaluated from the current state at every call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import smoothing
from .smoothing import SmoothingKind
from .surface import SurfaceSpec, boundary_distance, surface_value

StateFn = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class UncertaintyModel:
    """What the controller knows about ``x^(n) = f(x) + b(x) u``.

    ``f_hat`` is the nominal drift, ``f_bound`` bounds ``|f_hat - f|`` and the
    true input gain lies in ``[b_min, b_max]``.
    """

    f_hat: StateFn
    f_bound: StateFn
    b_min: float
    b_max: float
    b_hat: float = field(init=False)
    beta: float = field(init=False)

    def __post_init__(self):
        if not (math.isfinite(self.b_min) and math.isfinite(self.b_max)):
            raise ValueError("b_min and b_max must be finite")
        if not 0.0 < self.b_min <= self.b_max:
            raise ValueError(
                f"input gain bounds must satisfy 0 < b_min <= b_max, "
                f"got b_min={self.b_min!r}, b_max={self.b_max!r}"
            )
        object.__setattr__(self, "b_hat", math.sqrt(self.b_max * self.b_min))
        object.__setattr__(self, "beta", math.sqrt(self.b_max / self.b_min))


@dataclass(frozen=True)
class ControllerConfig:
    surface: SurfaceSpec
    uncertainty: UncertaintyModel
    eta: float
    phi: float
    smoothing: SmoothingKind = SmoothingKind.SATURATION
    gain_safety: float = 1.0

    def __post_init__(self):
        for name in ("eta", "phi", "gain_safety"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class DesiredState:
    """Desired ``[xd, xd', ..., xd^(n-1)]`` plus ``xd^(n)`` for feedforward."""

    vector: np.ndarray
    nth_derivative: float

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=float)
        if v.ndim != 1 or not np.all(np.isfinite(v)) or not math.isfinite(self.nth_derivative):
            raise ValueError(f"desired state must be a finite vector, got {self.vector!r}")
        object.__setattr__(self, "vector", v)


@dataclass(frozen=True)
class ControlDiagnostics:
    s: float
    s_phi: float
    K: float
    u_eq: float


def _error(cfg: ControllerConfig, state, desired: DesiredState) -> np.ndarray:
    x = np.asarray(state, dtype=float)
    n = cfg.surface.order_n
    if x.shape != (n,) or desired.vector.shape != (n,):
        raise ValueError(
            f"state {x.shape} and desired {desired.vector.shape} must both have shape ({n},)"
        )
    return x - desired.vector


def _eval(fn: StateFn, x: np.ndarray, what: str) -> float:
    value = float(fn(x))
    if not math.isfinite(value):
        raise ValueError(f"{what} is not finite ({value!r}) at state {x.tolist()}")
    return value


def _equivalent(cfg: ControllerConfig, x: np.ndarray, desired: DesiredState, e: np.ndarray) -> float:
    f_hat = _eval(cfg.uncertainty.f_hat, x, "f_hat")
    w = -f_hat + desired.nth_derivative - float(np.dot(cfg.surface.coeffs_cbar, e))
    return w / cfg.uncertainty.b_hat


def _gain(cfg: ControllerConfig, x: np.ndarray, u_eq: float) -> float:
    unc = cfg.uncertainty
    F = _eval(unc.f_bound, x, "f_bound")
    if F < 0.0:
        raise ValueError(f"f_bound must be nonnegative, got {F!r} at state {x.tolist()}")
    K = unc.beta / unc.b_hat * (cfg.eta + F) + (unc.beta - 1.0) * abs(u_eq)
    return cfg.gain_safety * K


def equivalent_control(cfg: ControllerConfig, state, desired: DesiredState) -> float:
    e = _error(cfg, state, desired)
    return _equivalent(cfg, np.asarray(state, dtype=float), desired, e)


def robust_gain(cfg: ControllerConfig, state, desired: DesiredState) -> float:
    """Smallest admissible switching gain at ``state``, times ``gain_safety``."""
    x = np.asarray(state, dtype=float)
    e = _error(cfg, x, desired)
    return _gain(cfg, x, _equivalent(cfg, x, desired, e))


def control(cfg: ControllerConfig, state, desired: DesiredState) -> tuple[float, ControlDiagnostics]:
    x = np.asarray(state, dtype=float)
    e = _error(cfg, x, desired)
    u_eq = _equivalent(cfg, x, desired, e)
    K = _gain(cfg, x, u_eq)
    s = surface_value(cfg.surface, e)
    u = u_eq - K * smoothing.evaluate(cfg.smoothing, s, cfg.phi)
    return u, ControlDiagnostics(s=s, s_phi=boundary_distance(s, cfg.phi), K=K, u_eq=u_eq)
