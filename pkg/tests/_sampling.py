"""Random closed-loop draws for the robust-gain sufficiency check."""

import numpy as np

from smoothsmc.controller import ControllerConfig, DesiredState, UncertaintyModel, control
from smoothsmc.smoothing import SmoothingKind
from smoothsmc.surface import make_surface, surface_rate


def random_config(rng, kind=SmoothingKind.SATURATION):
    n = int(rng.integers(1, 6))
    a, c = rng.normal(0, 2, 2)
    F0, F1 = rng.uniform(0, 2), rng.uniform(0, 1)
    b_min = rng.uniform(0.1, 2.0)
    b_max = b_min * rng.uniform(1.0, 9.0)
    unc = UncertaintyModel(lambda x: a * np.sin(x[0]) + c * x[-1],
                           lambda x: F0 + F1 * abs(x[0]), b_min, b_max)
    return ControllerConfig(make_surface(n, rng.uniform(0.2, 5.0)), unc,
                            eta=rng.uniform(0.01, 2.0), phi=rng.uniform(0.01, 1.0),
                            smoothing=kind)


def _extreme_or_uniform(rng, lo, hi):
    u = rng.random()
    if u < 0.25:
        return lo
    if u < 0.5:
        return hi
    return rng.uniform(lo, hi)


def sufficiency_margins(rng, cfg, draws):
    """``sgn(s_phi) * s' + eta`` for draws outside the layer; must be <= 0.

    The plant is any drift in the F-tube around f_hat and any gain in
    [b_min, b_max], with s' taken from the true plant.
    """
    n = cfg.surface.order_n
    unc = cfg.uncertainty
    out = []
    for _ in range(draws):
        x = rng.normal(0, 2, n)
        d = DesiredState(rng.normal(0, 2, n), float(rng.normal(0, 3)))
        u, diag = control(cfg, x, d)
        if diag.s_phi == 0.0:
            continue
        f = unc.f_hat(x) + _extreme_or_uniform(rng, -1.0, 1.0) * unc.f_bound(x)
        b = _extreme_or_uniform(rng, unc.b_min, unc.b_max)
        e_n = f + b * u - d.nth_derivative
        sdot = surface_rate(cfg.surface, x - d.vector, e_n)
        out.append(np.sign(diag.s_phi) * sdot + cfg.eta)
    return np.array(out)
