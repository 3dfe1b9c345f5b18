"""Ground-truth plants ``x^(n) = f(x) + b(x) u``, reference trajectories and
a fixed-step closed-loop simulator.

The control input is held constant over each control period (zero-order
hold) and the plant is advanced with classical RK4, optionally using several
integration substeps per control period.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .controller import ControllerConfig, DesiredState, UncertaintyModel, control

DIVERGENCE_LIMIT = 1e12
_ASSUMPTION_RTOL = 1e-12


class ScenarioError(ValueError):
    """A plant left the uncertainty envelope the controller was designed for."""


class DivergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class PlantModel:
    order_n: int
    f_true: Callable[[np.ndarray], float]
    b_true: Callable[[np.ndarray], float]
    name: str = "plant"


@dataclass(frozen=True)
class DesiredTrajectory:
    """``eval(t)`` returns the desired state and its n-th derivative."""

    eval: Callable[[float], DesiredState]
    order_n: int
    name: str = "trajectory"


# -- reference trajectories ---------------------------------------------------

def sine_trajectory(n: int, amplitude: float = 1.0, omega: float = 1.0,
                    phase: float = 0.0, offset: float = 0.0) -> DesiredTrajectory:
    """``xd = offset + A sin(w t + phase)`` with analytic derivatives."""

    def at(t: float) -> DesiredState:
        d = [amplitude * omega**k * math.sin(omega * t + phase + k * math.pi / 2)
             for k in range(n + 1)]
        d[0] += offset
        return DesiredState(np.array(d[:n]), d[n])

    return DesiredTrajectory(at, n, f"sine(A={amplitude:g}, w={omega:g})")


def smooth_step_trajectory(n: int, height: float = 1.0, t0: float = 1.0,
                           width: float = 0.5, offset: float = 0.0) -> DesiredTrajectory:
    """``xd = offset + H/2 (1 + tanh((t - t0)/width))``.

    Derivatives use d^k tanh(z)/dz^k = P_k(tanh z) with
    ``P_{k+1}(y) = (1 - y^2) P_k'(y)``.
    """
    polys = [np.array([0.0, 1.0])]
    for _ in range(n):
        polys.append(P.polymul([1.0, 0.0, -1.0], P.polyder(polys[-1])))

    def at(t: float) -> DesiredState:
        y = math.tanh((t - t0) / width)
        d = [offset + 0.5 * height * (1.0 + y)]
        for k in range(1, n + 1):
            d.append(0.5 * height * P.polyval(y, polys[k]) / width**k)
        return DesiredState(np.array(d[:n]), float(d[n]))

    return DesiredTrajectory(at, n, f"smooth_step(H={height:g}, t0={t0:g})")


def constant_trajectory(n: int, value: float = 0.0) -> DesiredTrajectory:
    state = DesiredState(np.r_[value, np.zeros(n - 1)], 0.0)
    return DesiredTrajectory(lambda t: state, n, f"constant({value:g})")


# -- plant families -----------------------------------------------------------
# Drift is linear in unknown parameters: f(x) = sum_k a_k * r_k(x) + d(x).

def _duffing_regressors(x):
    return (-x[1] * abs(x[1]), -x[0] ** 3)


def _pendulum_regressors(x):
    return (-math.sin(x[0]), -x[1])


def _chain_regressors(x):
    return ()


@dataclass(frozen=True)
class PlantFamily:
    name: str
    regressors: Callable[[np.ndarray], tuple]
    n_params: int
    order_n: int | None = None  # None: any order


FAMILIES = {
    "duffing": PlantFamily("duffing", _duffing_regressors, 2, order_n=2),
    "pendulum": PlantFamily("pendulum", _pendulum_regressors, 2, order_n=2),
    "chain": PlantFamily("chain", _chain_regressors, 0),
}


def _family(name: str, n: int) -> PlantFamily:
    try:
        fam = FAMILIES[name]
    except KeyError:
        raise ValueError(f"unknown plant family {name!r}; expected one of {sorted(FAMILIES)}") from None
    if fam.order_n is not None and fam.order_n != n:
        raise ValueError(f"plant family {name!r} has order {fam.order_n}, not {n}")
    return fam


def make_plant(family: str, n: int, params: Sequence[float] = (), *, b0: float = 1.0,
               b_var: float = 0.0, d_const: float = 0.0, d_amp: float = 0.0,
               d_freq: float = 1.0) -> PlantModel:
    """True plant of a family.

    ``b(x) = b0 (1 + b_var sin x0)`` and ``d(x) = d_const + d_amp sin(d_freq x0)``.
    """
    fam = _family(family, n)
    a = tuple(float(p) for p in params)
    if len(a) != fam.n_params:
        raise ValueError(f"plant family {family!r} takes {fam.n_params} parameters, got {len(a)}")
    reg = fam.regressors

    def f(x):
        return sum(ak * rk for ak, rk in zip(a, reg(x))) + d_const + d_amp * math.sin(d_freq * x[0])

    def b(x):
        return b0 * (1.0 + b_var * math.sin(x[0]))

    return PlantModel(n, f, b, family)


def make_uncertainty(family: str, n: int, params_hat: Sequence[float] = (),
                     param_err: Sequence[float] = (), *, d_bound: float = 0.0,
                     f_scale: float = 1.0, f_offset: float = 0.0,
                     b_min: float = 1.0, b_max: float = 1.0) -> UncertaintyModel:
    """Nominal model of a family and the matching bound on the drift error.

    ``F(x) = f_scale * (sum_k da_k |r_k(x)| + d_bound) + f_offset``.
    """
    fam = _family(family, n)
    a_hat = tuple(float(p) for p in params_hat)
    da = tuple(float(p) for p in param_err)
    if len(a_hat) != fam.n_params or len(da) != fam.n_params:
        raise ValueError(f"plant family {family!r} takes {fam.n_params} nominal parameters and errors")
    if any(v < 0 for v in da) or d_bound < 0 or f_scale < 0 or f_offset < 0:
        raise ValueError("parameter errors, d_bound, f_scale and f_offset must be nonnegative")
    reg = fam.regressors

    def f_hat(x):
        return sum(ak * rk for ak, rk in zip(a_hat, reg(x)))

    def f_bound(x):
        return f_scale * (sum(e * abs(r) for e, r in zip(da, reg(x))) + d_bound) + f_offset

    return UncertaintyModel(f_hat, f_bound, b_min, b_max)


# -- integration --------------------------------------------------------------

def _rhs(plant: PlantModel, x: np.ndarray, u: float) -> np.ndarray:
    top = float(plant.f_true(x)) + float(plant.b_true(x)) * u
    dx = np.empty_like(x)
    dx[:-1] = x[1:]
    dx[-1] = top
    if not np.all(np.isfinite(dx)):
        raise DivergenceError(f"non-finite derivative {dx.tolist()} at state {x.tolist()}")
    return dx


def step(plant: PlantModel, state, u: float, dt: float) -> np.ndarray:
    """One RK4 step of the state chain with ``u`` held constant."""
    if not dt > 0.0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    x = np.asarray(state, dtype=float)
    if x.shape != (plant.order_n,):
        raise ValueError(f"state has shape {x.shape}, expected ({plant.order_n},)")
    k1 = _rhs(plant, x, u)
    k2 = _rhs(plant, x + 0.5 * dt * k1, u)
    k3 = _rhs(plant, x + 0.5 * dt * k2, u)
    k4 = _rhs(plant, x + dt * k3, u)
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@dataclass(frozen=True)
class TrajectoryLog:
    """Closed-loop time series on the grid ``t_k = k * dt``."""

    dt: float
    state: np.ndarray
    desired: np.ndarray
    s: np.ndarray
    s_phi: np.ndarray
    K: np.ndarray
    u: np.ndarray
    V: np.ndarray = field(init=False)

    def __post_init__(self):
        for name in ("state", "desired", "s", "s_phi", "K", "u"):
            object.__setattr__(self, name, np.array(getattr(self, name), dtype=float))
        object.__setattr__(self, "V", 0.5 * self.s_phi**2)
        for name in ("state", "desired", "s", "s_phi", "K", "u", "V"):
            getattr(self, name).setflags(write=False)

    def __len__(self) -> int:
        return len(self.s)

    @property
    def order_n(self) -> int:
        return self.state.shape[1]

    @property
    def t(self) -> np.ndarray:
        return np.arange(len(self)) * self.dt

    @property
    def error(self) -> np.ndarray:
        return self.state - self.desired

    def header(self) -> list[str]:
        n = self.order_n
        return (["t"] + [f"x{i}" for i in range(n)] + [f"xd{i}" for i in range(n)]
                + ["s", "s_phi", "K", "u", "V"])

    def to_csv(self, fh=None) -> str | None:
        """Write 17-significant-digit CSV to ``fh``, or return it as a string."""
        out = io.StringIO() if fh is None else fh
        w = csv.writer(out, lineterminator="\n")
        w.writerow(self.header())
        cols = np.column_stack([self.t, self.state, self.desired,
                                self.s, self.s_phi, self.K, self.u, self.V])
        for row in cols:
            w.writerow([f"{v:.17g}" for v in row])
        return out.getvalue() if fh is None else None


def n_steps(t_end: float, dt: float) -> int:
    # t_end / dt carries rounding noise, e.g. 10 / 0.001 = 10000.000000000002
    return max(1, math.ceil(t_end / dt - 1e-9))


def default_dt(plant: PlantModel, cfg: ControllerConfig, traj: DesiredTrajectory, x0) -> float:
    """``min(1e-3, 0.01/lam, phi / (10 |s'(0)|))`` with s'(0) from the true plant."""
    x = np.asarray(x0, dtype=float)
    d = traj.eval(0.0)
    u, _ = control(cfg, x, d)
    e = x - d.vector
    e_n = float(plant.f_true(x)) + float(plant.b_true(x)) * u - d.nth_derivative
    sdot = abs(e_n + float(np.dot(cfg.surface.coeffs_cbar, e)))
    candidates = [1e-3, 0.01 / cfg.surface.lam]
    if sdot > 0:
        candidates.append(cfg.phi / (10.0 * sdot))
    return min(candidates)


def _check_assumptions(plant, unc: UncertaintyModel, x, t):
    f, fh, F = float(plant.f_true(x)), float(unc.f_hat(x)), float(unc.f_bound(x))
    if abs(fh - f) > F * (1 + _ASSUMPTION_RTOL) + _ASSUMPTION_RTOL:
        raise ScenarioError(
            f"drift bound |f_hat - f| <= F violated at t={t:.6g}: "
            f"|{fh:.6g} - {f:.6g}| > {F:.6g}"
        )
    b = float(plant.b_true(x))
    if not unc.b_min * (1 - _ASSUMPTION_RTOL) <= b <= unc.b_max * (1 + _ASSUMPTION_RTOL):
        raise ScenarioError(
            f"input gain bound b_min <= b <= b_max violated at t={t:.6g}: "
            f"b={b:.6g} not in [{unc.b_min:.6g}, {unc.b_max:.6g}]"
        )


def simulate(plant: PlantModel, cfg: ControllerConfig, traj: DesiredTrajectory, x0,
             t_end: float, dt: float, *, substeps: int = 1,
             check_assumptions: bool = True) -> TrajectoryLog:
    """Run the closed loop from ``x0`` over ``[0, t_end]``.

    ``dt`` is the control period and log spacing; the plant is integrated with
    ``substeps`` RK4 steps per period. The log has ``ceil(t_end/dt) + 1`` rows.
    """
    n = cfg.surface.order_n
    if plant.order_n != n or traj.order_n != n:
        raise ValueError(
            f"order mismatch: plant {plant.order_n}, trajectory {traj.order_n}, surface {n}"
        )
    if not dt > 0.0 or not t_end >= dt:
        raise ValueError(f"need dt > 0 and t_end >= dt, got dt={dt!r}, t_end={t_end!r}")
    if substeps < 1:
        raise ValueError(f"substeps must be >= 1, got {substeps!r}")
    x = np.asarray(x0, dtype=float).copy()
    if x.shape != (n,):
        raise ValueError(f"x0 has shape {x.shape}, expected ({n},)")

    rows = n_steps(t_end, dt) + 1
    state = np.empty((rows, n))
    desired = np.empty((rows, n))
    diag = np.empty((rows, 4))  # s, s_phi, K, u
    h = dt / substeps
    for k in range(rows):
        t = k * dt
        if np.any(np.abs(x) > DIVERGENCE_LIMIT) or not np.all(np.isfinite(x)):
            raise DivergenceError(f"state diverged at t={t:.6g}: {x.tolist()}")
        if check_assumptions:
            _check_assumptions(plant, cfg.uncertainty, x, t)
        d = traj.eval(t)
        u, dg = control(cfg, x, d)
        state[k] = x
        desired[k] = d.vector
        diag[k] = (dg.s, dg.s_phi, dg.K, u)
        if k + 1 < rows:
            for _ in range(substeps):
                x = step(plant, x, u, h)
    return TrajectoryLog(dt, state, desired, diag[:, 0].copy(), diag[:, 1].copy(),
                         diag[:, 2].copy(), diag[:, 3].copy())


def total_variation(u) -> float:
    """Sum of |u_{k+1} - u_k|; a chattering measure."""
    return float(np.sum(np.abs(np.diff(np.asarray(u)))))


def benchmark_plants() -> list[tuple[PlantModel, UncertaintyModel, DesiredTrajectory]]:
    """The shipped benchmark scenarios as (plant, uncertainty, trajectory)."""
    from .scenario import shipped_scenarios

    return [(sc.plant, sc.uncertainty, sc.trajectory) for sc in shipped_scenarios()]
