"""End-to-end acceptance gate; each criterion prints one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from smoothsmc.bounds import zeta_table
from smoothsmc.cli import main
from smoothsmc.scenario import build, load_scenario, shipped_path
from smoothsmc.smoothing import SmoothingKind
from smoothsmc.verify import (check_invariance, check_lyapunov, check_reaching, search_witness,
                              verify_run)

from _sampling import random_config, sufficiency_margins


@pytest.fixture
def announce(capsys):
    def emit(k, name, ok, detail):
        with capsys.disabled():
            print(f"\n[ACCEPT] {k}. {name}: {'PASS' if ok else 'FAIL'}  {detail}")
    return emit


def brute_zeta(n):
    # expand sum over all j < i term by term with exact rationals
    z = []
    for i in range(n):
        total = Fraction(1)
        for j in range(i):
            total += Fraction(math.comb(i, j)) * z[j]
        z.append(total)
    return [int(v) for v in z]


def test_1_zeta_table(announce):
    t0 = time.perf_counter()
    table = zeta_table(6)
    elapsed = time.perf_counter() - t0
    ok = (list(table.zeta) == brute_zeta(6) and tuple(table.zeta[:3]) == (1, 2, 6)
          and table.zeta[2] != 4 and elapsed < 1e-3)
    announce(1, "zeta table", ok, f"zeta={list(table.zeta)} in {elapsed * 1e6:.0f} us")
    assert ok


def test_2_reaching_time(benchmark_runs, announce):
    details, ok = [], True
    for sc, _ in benchmark_runs:
        assert sc.controller.smoothing is SmoothingKind.SATURATION and sc.dt == 1e-3
        t0 = time.perf_counter()
        log = sc.simulate()
        elapsed = time.perf_counter() - t0
        r = check_reaching(log, sc.controller.eta, 1e-4)
        ok &= r.passed and elapsed < 10.0
        details.append(f"{sc.name} {r.t_reach_observed:.3f}<={r.t_reach_bound:.3f} ({elapsed:.1f}s)")
    announce(2, "reaching time and envelope", ok, "; ".join(details))
    assert ok


def test_3_lyapunov(benchmark_runs, undergained_run, announce):
    details, ok = [], True
    for sc, log in benchmark_runs:
        r = check_lyapunov(log, sc.controller.eta)
        ok &= r.passed
        details.append(f"{sc.name} {r.max_violation:.2e}<={r.tol:.2e}")
    sc, log = undergained_run
    bad = check_lyapunov(log, sc.controller.eta)
    ok &= not bad.passed
    details.append(f"{sc.name} rejected ({bad.max_violation:.2e}>{bad.tol:.2e})")
    announce(3, "Lyapunov decrement", ok, "; ".join(details))
    assert ok


def test_4_containment(benchmark_runs, announce):
    details, ok = [], True
    for sc, log in benchmark_runs:
        rep = verify_run(log, sc.controller, sc.config.tail_fraction, steady_rel=1e-2)
        st = rep.steady_state
        k0 = int(round(st.t_from / log.dt))
        inv = check_invariance(log, sc.controller.phi, st.t_from, 1e-3)
        ok &= st.corrected_pass and inv.passed
        worst = max(m / b for m, b in zip(st.max_abs_error, st.corrected_bounds))
        details.append(f"{sc.name} max ratio {worst:.3f}, max|s|/phi {inv.max_abs_s / sc.controller.phi:.3f}")
        assert k0 < len(log)
    announce(4, "steady-state containment", ok, "; ".join(details))
    assert ok


def test_5_witness_search(announce):
    t0 = time.perf_counter()
    res = search_witness(3, 1.0, 1.0, 2, 20_000, random_fraction=0.5, seed=0)
    elapsed = time.perf_counter() - t0
    ok = res.random_evaluations >= 10_000 and res.best <= 6.0 * (1 + 1e-3) and elapsed < 60.0
    flag = ("2^i bound violation demonstrated" if res.exceeds_slotine
            else "2^i bound 4 not exceeded (gap recorded)")
    announce(5, "witness search", ok,
             f"best |e''|={res.best:.6f} over {res.evaluations} schedules "
             f"({res.random_evaluations} random), {flag}, {elapsed:.1f}s")
    assert ok


def test_6_gain_sufficiency(announce):
    rng = np.random.default_rng(20240601)
    t0 = time.perf_counter()
    worst, checked = -math.inf, 0
    for _ in range(100):
        margins = sufficiency_margins(rng, random_config(rng), 1000)
        checked += margins.size
        worst = max(worst, float(margins.max(initial=-math.inf)))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 5.0
    announce(6, "gain sufficiency", ok,
             f"100000 draws, {checked} outside the layer, worst margin {worst:.2e}, {elapsed:.1f}s")
    assert ok


def test_7_integrator_order(announce):
    cfg = load_scenario(str(shipped_path("varying_gain_n2.cfg"))).replace(
        smoothing=SmoothingKind.HYPERBOLIC_TANGENT, phi=0.5, t_end=2.0, dt=0.01)
    sc = build(cfg)
    end = {m: sc.simulate(substeps=m).state[-1] for m in (1, 2, 8)}
    ratio = float(np.linalg.norm(end[1] - end[8]) / np.linalg.norm(end[2] - end[8]))
    ok = 12.0 <= ratio <= 20.0
    announce(7, "RK4 order", ok, f"error ratio {ratio:.2f} (steps h, h/2 vs h/8 reference)")
    assert ok


def test_8_determinism(tmp_path, announce):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    path = str(shipped_path("varying_gain_n2.cfg"))
    rc = [main(["simulate", path, "--out", str(p)]) for p in (a, b)]
    ok = rc == [0, 0] and a.read_bytes() == b.read_bytes()
    announce(8, "determinism", ok, f"{a.stat().st_size} bytes, identical={a.read_bytes() == b.read_bytes()}")
    assert ok
