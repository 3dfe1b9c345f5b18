"""Steady-state tracking error bounds inside the boundary layer.

Once |s| <= phi holds for good, each error derivative settles inside

    |e^(i)| <= zeta_i * lam^(i-n+1) * phi,

with ``zeta_0 = 1`` and ``zeta_i = 1 + sum_{j<i} C(i, j) zeta_j``. The older
multipliers ``2^i`` are kept alongside for comparison; the two agree for
``i <= 1`` and the zeta multipliers are strictly larger from ``i = 2`` on.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .surface import SurfaceSpec, _as_error, _check_order, surface_value


@dataclass(frozen=True)
class ZetaTable:
    order_n: int
    zeta: tuple[int, ...]
    slotine: tuple[int, ...]

    @property
    def first_divergence(self) -> int | None:
        """First derivative index where the two multipliers differ."""
        for i, (z, p) in enumerate(zip(self.zeta, self.slotine)):
            if z != p:
                return i
        return None

    def rows(self) -> list[tuple[int, int, int]]:
        return list(zip(range(self.order_n), self.zeta, self.slotine))


def zeta_table(n: int) -> ZetaTable:
    n = _check_order(n)
    zeta = [1]
    for i in range(1, n):
        zeta.append(1 + sum(comb(i, j) * zeta[j] for j in range(i)))
    return ZetaTable(n, tuple(zeta), tuple(2**i for i in range(n)))


@dataclass(frozen=True)
class ConvergenceRegion:
    """Intersection of the layer |s| <= phi with a box on the error derivatives."""

    surface: SurfaceSpec
    phi: float
    per_derivative_bounds: np.ndarray
    multipliers: tuple[int, ...]

    @property
    def order_n(self) -> int:
        return self.surface.order_n


def _region(spec: SurfaceSpec, phi: float, multipliers) -> ConvergenceRegion:
    phi = float(phi)
    if not phi > 0.0 or not np.isfinite(phi):
        raise ValueError(f"boundary layer thickness must be finite and > 0, got {phi!r}")
    n, lam = spec.order_n, spec.lam
    b = np.array([m * lam ** (i - n + 1) * phi for i, m in enumerate(multipliers)])
    b.setflags(write=False)
    return ConvergenceRegion(spec, phi, b, tuple(multipliers))


def region(spec: SurfaceSpec, phi: float) -> ConvergenceRegion:
    return _region(spec, phi, zeta_table(spec.order_n).zeta)


def slotine_region(spec: SurfaceSpec, phi: float) -> ConvergenceRegion:
    """Same construction with the ``2^i`` multipliers, for comparison only."""
    return _region(spec, phi, zeta_table(spec.order_n).slotine)


def contains(reg: ConvergenceRegion, err) -> tuple[bool, np.ndarray]:
    """Membership test and per-axis margins ``bound - |e^(i)|``.

    Both the layer and the box must hold; the box alone pokes outside the layer.
    """
    e = _as_error(reg.surface, err)
    margins = reg.per_derivative_bounds - np.abs(e)
    in_layer = abs(surface_value(reg.surface, e)) <= reg.phi
    return bool(in_layer and np.all(margins >= 0.0)), margins
