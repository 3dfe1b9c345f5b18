"""Sliding surface s = (d/dt + lambda)^(n-1) e and its boundary layer.

Coefficient layout
------------------
``coeffs_c`` is ordered highest power of lambda first, so that it pairs
with the error vector ``e = [e, e', ..., e^(n-1)]``::

    s = coeffs_c[0] * e + coeffs_c[1] * e' + ... + coeffs_c[n-1] * e^(n-1)
      = C(n-1, n-1) lam^(n-1) e + ... + C(n-1, 1) lam e^(n-2) + e^(n-1)

``coeffs_cbar`` is ``coeffs_c`` shifted right by one slot with a leading
zero, which gives ``s' = e^(n) + coeffs_cbar . e``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_ORDER = 20


def _check_order(n: int) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise TypeError(f"order must be an integer, got {n!r}")
    n = int(n)
    if n < 1:
        raise ValueError(f"order must be >= 1, got {n}")
    if n > MAX_ORDER:
        raise ValueError(f"order {n} exceeds the supported maximum {MAX_ORDER}")
    return n


def binomial_coefficients(n: int) -> list[int]:
    """Return ``[C(n-1, 0), ..., C(n-1, n-1)]`` as exact integers.

    Uses the multiplicative recurrence ``c_i = c_{i-1} * (n - i) / i``; every
    intermediate product is divisible by ``i`` so integer division is exact.
    """
    n = _check_order(n)
    coeffs = [1]
    for i in range(1, n):
        coeffs.append(coeffs[-1] * (n - i) // i)
    return coeffs


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SurfaceSpec:
    order_n: int
    lam: float
    coeffs_c: np.ndarray
    coeffs_cbar: np.ndarray

    def __repr__(self) -> str:
        return f"SurfaceSpec(n={self.order_n}, lam={self.lam!r})"


def make_surface(n: int, lam: float) -> SurfaceSpec:
    n = _check_order(n)
    lam = float(lam)
    if not np.isfinite(lam) or lam <= 0.0:
        raise ValueError(f"lambda must be finite and > 0, got {lam!r}")
    binom = binomial_coefficients(n)
    # coeffs_c[k] = c_{n-1-k} * lam^(n-1-k); c_0 = 1 lands in the last slot.
    c = [float(binom[n - 1 - k]) * lam ** (n - 1 - k) for k in range(n)]
    c[-1] = 1.0
    cbar = [0.0] + c[:-1]
    return SurfaceSpec(n, lam, _frozen(c), _frozen(cbar))


def _as_error(spec: SurfaceSpec, err) -> np.ndarray:
    e = np.asarray(err, dtype=float)
    if e.shape != (spec.order_n,):
        raise ValueError(
            f"error vector has shape {e.shape}, expected ({spec.order_n},)"
        )
    return e


def surface_value(spec: SurfaceSpec, err) -> float:
    """s = c . e"""
    return float(np.dot(spec.coeffs_c, _as_error(spec, err)))


def surface_rate(spec: SurfaceSpec, err, err_n: float) -> float:
    """s' = e^(n) + cbar . e, where ``err_n`` is the n-th error derivative."""
    return float(err_n) + float(np.dot(spec.coeffs_cbar, _as_error(spec, err)))


def boundary_distance(s: float, phi: float) -> float:
    """Distance ``s - phi * sat(s / phi)`` from s to the layer |s| <= phi.

    Zero inside the layer, signed outside it.
    """
    if not phi > 0.0:
        raise ValueError(f"boundary layer thickness must be > 0, got {phi!r}")
    if s > phi:
        return s - phi
    if s < -phi:
        return s + phi
    return 0.0
