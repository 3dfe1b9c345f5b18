"""Switching functions used in place of sgn(s) in the control law."""

from __future__ import annotations

import enum
import math


class SmoothingKind(enum.Enum):
    SIGN = "sign"
    SATURATION = "sat"
    HYPERBOLIC_TANGENT = "tanh"

    @property
    def exact_outside_layer(self) -> bool:
        """True if the function equals sgn(s) whenever |s| >= phi."""
        return self is not SmoothingKind.HYPERBOLIC_TANGENT

    @classmethod
    def parse(cls, text: str) -> "SmoothingKind":
        try:
            return cls(text.strip().lower())
        except ValueError:
            choices = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown smoothing {text!r}; expected one of {choices}") from None


def sign_fn(s: float) -> float:
    if s > 0.0:
        return 1.0
    if s < 0.0:
        return -1.0
    return 0.0


def saturation(x: float) -> float:
    if x >= 1.0:
        return 1.0
    if x <= -1.0:
        return -1.0
    return x


def evaluate(kind: SmoothingKind, s: float, phi: float) -> float:
    """Evaluate the switching function; ``phi`` is ignored for ``SIGN``."""
    if not phi > 0.0:
        raise ValueError(f"boundary layer thickness must be > 0, got {phi!r}")
    if kind is SmoothingKind.SIGN:
        return sign_fn(s)
    if kind is SmoothingKind.SATURATION:
        # compare |s| with phi rather than |s/phi| with 1 so the saturated
        # branch returns exactly sgn(s) even when s/phi rounds below 1
        if abs(s) >= phi:
            return sign_fn(s)
        return s / phi
    if kind is SmoothingKind.HYPERBOLIC_TANGENT:
        return math.tanh(s / phi)
    raise TypeError(f"not a SmoothingKind: {kind!r}")
