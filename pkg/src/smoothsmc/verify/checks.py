"""Verdicts on closed-loop logs.

Reaching: |s_phi| must fall at least as fast as the line |s_phi(0)| - eta t
and hit zero no later than |s_phi(0)|/eta. Lyapunov: V = s_phi^2/2 must
decrease with V' <= -eta |s_phi| outside the layer. Steady state: the error
derivatives must settle inside the convergence region's box.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..bounds import ConvergenceRegion
from ..plant_sim import TrajectoryLog


@dataclass(frozen=True)
class ReachResult:
    t_reach_observed: float | None
    t_reach_bound: float
    s_phi0: float
    envelope_max_violation: float
    tol: float
    dt: float
    passed: bool


@dataclass(frozen=True)
class LyapunovResult:
    max_violation: float
    tol: float
    C: float
    samples: int
    passed: bool


@dataclass(frozen=True)
class InvarianceResult:
    t_from: float | None
    max_abs_s: float
    max_abs_s_phi: float
    phi: float
    tol_rel: float
    passed: bool


@dataclass(frozen=True)
class SteadyStateResult:
    t_from: float
    max_abs_error: tuple[float, ...]
    corrected_bounds: tuple[float, ...]
    slotine_bounds: tuple[float, ...]
    tol_rel: float
    corrected_pass: bool
    slotine_pass: bool


def check_reaching(log: TrajectoryLog, eta: float, tol: float = 1e-4) -> ReachResult:
    if len(log) == 0:
        raise ValueError("empty log")
    a = np.abs(log.s_phi)
    t = log.t
    bound = a[0] / eta
    inside = np.flatnonzero(a <= tol)
    k_reach = int(inside[0]) if inside.size else len(log)
    pre = slice(0, k_reach)
    excess = a[pre] - (a[0] - eta * t[pre])
    env_violation = float(np.max(excess)) if k_reach else 0.0
    t_obs = float(t[k_reach]) if inside.size else None
    passed = (t_obs is not None and t_obs <= bound + log.dt and env_violation <= tol)
    return ReachResult(t_obs, float(bound), float(log.s_phi[0]), env_violation, tol,
                       log.dt, bool(passed))


def lyapunov_constant(log: TrajectoryLog) -> float:
    """``C = max |s'|^2`` over steps taken wholly outside the layer.

    The exact one-step identity ``(V1 - V0)/dt = s_phi0 * m + m^2 dt/2``, with
    ``m = (s1 - s0)/dt``, puts the grid error of the decrement at
    ``m^2 dt / 2``; ``C`` doubles that for headroom.
    """
    idx = _outside_steps(log)
    if idx.size == 0:
        return 0.0
    m = (log.s[idx + 1] - log.s[idx]) / log.dt
    return float(np.max(m * m))


def _outside_steps(log: TrajectoryLog) -> np.ndarray:
    sp = log.s_phi
    same_side = np.sign(sp[:-1]) * np.sign(sp[1:]) > 0
    return np.flatnonzero(same_side)


def check_lyapunov(log: TrajectoryLog, eta: float, tol: float | None = None) -> LyapunovResult:
    """Discrete decrement ``(V_{k+1} - V_k)/dt + eta |s_phi_k| <= tol``.

    Only steps with both endpoints outside the layer on the same side count;
    inside the layer V is identically zero. ``tol`` defaults to ``C * dt``.
    """
    if len(log) < 2:
        raise ValueError("need at least two rows")
    C = lyapunov_constant(log)
    if tol is None:
        tol = C * log.dt
    idx = _outside_steps(log)
    if idx.size == 0:
        return LyapunovResult(0.0, float(tol), C, 0, True)
    vdot = (log.V[idx + 1] - log.V[idx]) / log.dt
    worst = float(np.max(vdot + eta * np.abs(log.s_phi[idx])))
    return LyapunovResult(worst, float(tol), C, int(idx.size), bool(worst <= tol))


def check_invariance(log: TrajectoryLog, phi: float, t_from: float | None,
                     tol_rel: float = 1e-3) -> InvarianceResult:
    """Once inside, the state must stay within ``|s| <= phi (1 + tol_rel)``."""
    if t_from is None:
        return InvarianceResult(None, float("nan"), float("nan"), phi, tol_rel, False)
    k0 = min(len(log) - 1, int(round(t_from / log.dt)))
    max_s = float(np.max(np.abs(log.s[k0:])))
    max_sp = float(np.max(np.abs(log.s_phi[k0:])))
    return InvarianceResult(float(t_from), max_s, max_sp, phi, tol_rel,
                            bool(max_s <= phi * (1.0 + tol_rel)))


def tail_start(log: TrajectoryLog, tail_fraction: float, gate: float = 0.0) -> int:
    """First row of the tail window: the last ``tail_fraction`` of the run, but
    never before ``gate``."""
    if not 0.0 < tail_fraction < 1.0:
        raise ValueError(f"tail_fraction must lie in (0, 1), got {tail_fraction!r}")
    t_end = (len(log) - 1) * log.dt
    t0 = max(t_end * (1.0 - tail_fraction), gate)
    return int(np.ceil(t0 / log.dt - 1e-9))


def check_steady_state(log: TrajectoryLog, region: ConvergenceRegion,
                       slotine: ConvergenceRegion, tail_fraction: float = 0.4,
                       *, gate: float = 0.0, tol_rel: float = 1e-2) -> SteadyStateResult:
    """Per-derivative tail maxima of ``|e^(i)|`` against both bound sets.

    ``gate`` is the earliest admissible tail time, normally the reaching bound
    plus a ``5/lam`` settling margin.
    """
    k0 = tail_start(log, tail_fraction, gate)
    if k0 >= len(log):
        raise ValueError(
            f"tail window is empty: it must start after t={gate:.6g} but the run "
            f"ends at t={(len(log) - 1) * log.dt:.6g}; use a longer t_end"
        )
    err = np.abs(log.error[k0:])
    maxima = err.max(axis=0)
    corr = region.per_derivative_bounds
    slot = slotine.per_derivative_bounds
    return SteadyStateResult(
        float(k0 * log.dt),
        tuple(float(v) for v in maxima),
        tuple(float(v) for v in corr),
        tuple(float(v) for v in slot),
        tol_rel,
        bool(np.all(maxima <= corr * (1.0 + tol_rel))),
        bool(np.all(maxima <= slot * (1.0 + tol_rel))),
    )
