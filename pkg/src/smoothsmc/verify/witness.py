"""Worst-case search over boundary-layer signals.

Inside the layer the error obeys the linear cascade

    (d/dt + lam)^(n-1) e = s(t),    |s(t)| <= phi,

so the largest steady excursion of any error derivative is a linear
functional of s over a box, maximised by bang-bang signals. The search draws
random bang-bang schedules, then refines the best ones coordinate-wise in
their switching times, and reports the largest tail excursion found.

Because ``p/(p + lam)`` has an impulse response of L1 norm 2 and L1 norms are
submultiplicative, no schedule can push ``|e^(i)|`` past
``2^i lam^(i-n+1) phi``; the search is expected to land below that.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from ..bounds import zeta_table
from ..plant_sim import TrajectoryLog
from ..surface import make_surface

DEFAULT_SWITCHES = 12
GRID_STEP = 0.01      # grid spacing, in units of 1/lam
TAIL_LENGTH = 5.0     # tail window, in units of 1/lam
_CHUNK = 1000


@dataclass(frozen=True)
class BangBangSchedule:
    """``s(t) = initial_sign * phi * (-1)^(number of switches <= t)``."""

    initial_sign: int
    switch_times: tuple[float, ...]
    phi: float

    def signs(self, t: np.ndarray) -> np.ndarray:
        counts = np.searchsorted(np.asarray(self.switch_times), t, side="right")
        return self.initial_sign * np.where(counts % 2 == 0, 1.0, -1.0)


class ErrorCascade:
    """Exact zero-order-hold discretisation of the cascade on a uniform grid."""

    def __init__(self, n: int, lam: float, dt: float):
        self.n, self.lam, self.dt = n, lam, dt
        # e^(n-1) = s - sum_k c_k e^(k) for k < n-1
        self.c = np.array(make_surface(n, lam).coeffs_c[:-1])
        m = n - 1
        if m == 0:
            self.Ad = np.zeros((0, 0))
            self.Bd = np.zeros(0)
            return
        A = np.zeros((m, m))
        A[:-1, 1:] = np.eye(m - 1)
        A[-1, :] = -self.c
        aug = np.zeros((m + 1, m + 1))
        aug[:m, :m] = A
        aug[m - 1, m] = 1.0
        E = expm(aug * dt)
        self.Ad = E[:m, :m]
        self.Bd = E[:m, m]

    def tail_max(self, s: np.ndarray, i: int, k_tail: int) -> np.ndarray:
        """Max of ``|e^(i)|`` over grid rows ``k >= k_tail`` for each row of ``s``.

        ``s`` has shape ``(batch, N)``; ``s[:, k]`` is held on ``[t_k, t_{k+1})``.
        For ``i = n-1`` both one-sided limits at each grid point are taken.
        """
        B, N = s.shape
        m = self.n - 1
        if m == 0:
            return np.abs(s[:, k_tail:]).max(axis=1)
        z = np.zeros((B, m))
        best = np.zeros(B)
        AdT, Bd = self.Ad.T, self.Bd
        top = i == m
        for k in range(N):
            if k >= k_tail:
                if top:
                    cz = z @ self.c
                    v = np.maximum(np.abs(s[:, k] - cz), np.abs(s[:, k - 1] - cz))
                else:
                    v = np.abs(z[:, i])
                np.maximum(best, v, out=best)
            z = z @ AdT + s[:, k, None] * Bd
        return best

    def trajectory(self, s: np.ndarray) -> np.ndarray:
        """All n error derivatives on the grid for one signal (right limits)."""
        N = len(s)
        out = np.empty((N, self.n))
        z = np.zeros(self.n - 1)
        for k in range(N):
            out[k, :-1] = z
            out[k, -1] = s[k] - z @ self.c
            if self.n > 1:
                z = self.Ad @ z + s[k] * self.Bd
        return out


@dataclass(frozen=True)
class WitnessResult:
    n: int
    lam: float
    phi: float
    i: int
    best: float
    schedule: BangBangSchedule
    evaluations: int
    random_evaluations: int
    corrected_bound: float
    slotine_bound: float
    dt: float
    horizon: float
    tail_from: float

    @property
    def exceeds_slotine(self) -> bool:
        return self.best > self.slotine_bound

    def within_corrected(self, tol: float = 1e-3) -> bool:
        return self.best <= self.corrected_bound * (1.0 + tol)

    @property
    def grid(self) -> np.ndarray:
        return np.arange(int(round(self.horizon / self.dt)) + 1) * self.dt


class _Problem:
    def __init__(self, n, lam, phi, i, switches):
        self.n, self.lam, self.phi, self.i, self.switches = n, lam, phi, i, switches
        self.dt = GRID_STEP / lam
        memory = (15.0 + 3.0 * n) / lam
        self.tail_len = TAIL_LENGTH / lam
        self.N = int(round((memory + self.tail_len) / self.dt)) + 1
        self.horizon = (self.N - 1) * self.dt
        self.k_tail = self.N - 1 - int(round(self.tail_len / self.dt))
        self.cascade = ErrorCascade(n, lam, self.dt)

    def signals(self, s0: np.ndarray, times: np.ndarray) -> np.ndarray:
        """Grid signal for a batch; a switch at tau acts from grid index ceil(tau/dt)."""
        B = len(s0)
        idx = np.clip(np.ceil(times / self.dt - 1e-9).astype(int), 0, self.N)
        flips = np.zeros((B, self.N + 1), dtype=np.int64)
        np.add.at(flips, (np.repeat(np.arange(B), times.shape[1]), idx.ravel()), 1)
        parity = np.cumsum(flips[:, : self.N], axis=1) % 2
        return self.phi * s0[:, None] * np.where(parity == 0, 1.0, -1.0)

    def evaluate(self, s0: np.ndarray, times: np.ndarray) -> np.ndarray:
        out = np.empty(len(s0))
        for a in range(0, len(s0), _CHUNK):
            sl = slice(a, a + _CHUNK)
            out[sl] = self.cascade.tail_max(self.signals(s0[sl], times[sl]), self.i, self.k_tail)
        return out

    def random_batch(self, seed: int, start: int, stop: int):
        s0 = np.empty(stop - start)
        times = np.empty((stop - start, self.switches))
        for r in range(start, stop):
            rng = np.random.default_rng([seed, r])
            s0[r - start] = 1.0 if rng.random() < 0.5 else -1.0
            times[r - start] = np.sort(rng.uniform(0.0, self.horizon, self.switches))
        return s0, times, self.evaluate(s0, times)


def _random_chunk(args):
    n, lam, phi, i, switches, seed, start, stop = args
    return _Problem(n, lam, phi, i, switches).random_batch(seed, start, stop)


def _refine(prob: _Problem, s0: float, times: np.ndarray, value: float, budget: int):
    """Coordinate ascent on switching times with a halving step."""
    step = 1.0 / prob.lam
    used = 0
    K = len(times)
    while budget - used > 0 and step >= prob.dt / 2:
        cands = [times.copy() for _ in range(2 * K)]
        for j in range(K):
            cands[2 * j][j] += step
            cands[2 * j + 1][j] -= step
        cand = np.sort(np.clip(np.array(cands), 0.0, prob.horizon), axis=1)
        signs = np.full(len(cand), s0)
        take = min(len(cand), budget - used)
        vals = prob.evaluate(signs[:take], cand[:take])
        used += take
        j = int(np.argmax(vals))
        if vals[j] > value:
            value, times = float(vals[j]), cand[j]
        else:
            step /= 2.0
    return times, value, used


def search_witness(n: int, lam: float, phi: float, i: int, budget: int, *,
                   switches: int = DEFAULT_SWITCHES, seed: int = 0, jobs: int = 1,
                   random_fraction: float = 0.5, refine_starts: int = 4) -> WitnessResult:
    """Search bang-bang schedules for the largest tail excursion of ``|e^(i)|``.

    ``budget`` counts cascade simulations: ``random_fraction`` of it goes to
    random restarts (restart ``r`` is seeded with ``(seed, r)``), the rest to
    refining the best ``refine_starts`` of them.
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget!r}")
    if not 0 <= i <= n - 1:
        raise ValueError(f"derivative index must lie in [0, {n - 1}], got {i}")
    if not (lam > 0 and phi > 0 and math.isfinite(lam) and math.isfinite(phi)):
        raise ValueError("lambda and phi must be finite and > 0")
    if switches < 1:
        raise ValueError("need at least one switch")
    table = zeta_table(n)
    prob = _Problem(n, lam, phi, i, switches)

    n_random = max(1, min(budget, int(round(budget * random_fraction))))
    bounds = list(range(0, n_random, _CHUNK)) + [n_random]
    tasks = [(n, lam, phi, i, switches, seed, a, b) for a, b in zip(bounds[:-1], bounds[1:])]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_random_chunk, tasks))
    else:
        parts = [prob.random_batch(seed, a, b) for *_, a, b in tasks]
    s0 = np.concatenate([p[0] for p in parts])
    times = np.concatenate([p[1] for p in parts])
    vals = np.concatenate([p[2] for p in parts])

    order = np.argsort(-vals, kind="stable")
    best_k = int(order[0])
    best_val, best_s0, best_times = float(vals[best_k]), s0[best_k], times[best_k]
    remaining = budget - n_random
    for k in order[:refine_starts]:
        if remaining <= 0:
            break
        t_ref, v_ref, used = _refine(prob, s0[k], times[k], float(vals[k]), remaining)
        remaining -= used
        if v_ref > best_val:
            best_val, best_s0, best_times = v_ref, s0[k], t_ref

    scale = lam ** (i - n + 1) * phi
    return WitnessResult(
        n=n, lam=lam, phi=phi, i=i, best=best_val,
        schedule=BangBangSchedule(int(best_s0), tuple(float(t) for t in best_times), phi),
        evaluations=budget - remaining,
        random_evaluations=n_random,
        corrected_bound=table.zeta[i] * scale,
        slotine_bound=table.slotine[i] * scale,
        dt=prob.dt, horizon=prob.horizon, tail_from=prob.k_tail * prob.dt,
    )


def witness_log(result: WitnessResult) -> TrajectoryLog:
    """Replay the best schedule as a log (desired state zero, no plant input).

    The state columns hold the error derivatives; ``K`` and ``u`` are zero.
    """
    prob = _Problem(result.n, result.lam, result.phi, result.i, len(result.schedule.switch_times))
    s = prob.signals(np.array([float(result.schedule.initial_sign)]),
                     np.array([result.schedule.switch_times]))[0]
    err = prob.cascade.trajectory(s)
    zeros = np.zeros(len(s))
    return TrajectoryLog(prob.dt, err, np.zeros_like(err), s, zeros.copy(), zeros.copy(), zeros.copy())
