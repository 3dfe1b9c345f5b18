"""Delimited data for plotting the reaching envelope and the n = 2 region."""

from __future__ import annotations

import csv
import io

import numpy as np
from shapely.geometry import Polygon, box

from .bounds import ConvergenceRegion
from .plant_sim import TrajectoryLog


def _write(rows, header, fh=None):
    out = io.StringIO() if fh is None else fh
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return out.getvalue() if fh is None else None


def envelope_csv(log: TrajectoryLog, eta: float, fh=None):
    """``t, |s_phi|, |s_phi(0)| - eta t``."""
    a = np.abs(log.s_phi)
    t = log.t
    env = a[0] - eta * t
    rows = ([f"{x:.17g}" for x in r] for r in zip(t, a, env))
    return _write(rows, ["t", "abs_s_phi", "envelope"], fh)


def region_polygons(reg: ConvergenceRegion, window: float = 1.5) -> dict[str, Polygon]:
    """Box, layer strip and their intersection in the (e, e') plane.

    The strip ``|lam e + e'| <= phi`` is clipped to the box scaled by ``window``.
    """
    if reg.order_n != 2:
        raise ValueError(f"region polygons are only defined for n = 2, got n = {reg.order_n}")
    b0, b1 = reg.per_derivative_bounds
    lam, phi = reg.surface.lam, reg.phi
    frame = box(-window * b0, -window * b1, window * b0, window * b1)
    far = 10.0 * window * (b0 + b1 + phi / lam)
    strip = Polygon([(-far, lam * far - phi), (-far, lam * far + phi),
                     (far, -lam * far + phi), (far, -lam * far - phi)])
    layer = strip.intersection(frame)
    rect = box(-b0, -b1, b0, b1)
    return {"box": rect, "layer": layer, "region": rect.intersection(strip)}


def region_csv(reg: ConvergenceRegion, fh=None):
    """``shape, vertex, e0, e1`` rows; each polygon ring is closed."""
    rows = []
    for name, poly in region_polygons(reg).items():
        for k, (x, y) in enumerate(poly.exterior.coords):
            rows.append([name, k, f"{x:.17g}", f"{y:.17g}"])
    return _write(rows, ["shape", "vertex", "e0", "e1"], fh)
