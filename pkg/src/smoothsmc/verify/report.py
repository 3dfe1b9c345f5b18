from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

from ..bounds import region, slotine_region
from ..controller import ControllerConfig
from ..plant_sim import TrajectoryLog
from .checks import (InvarianceResult, LyapunovResult, ReachResult, SteadyStateResult,
                     check_invariance, check_lyapunov, check_reaching, check_steady_state)

SETTLING_TIME_CONSTANTS = 5.0


@dataclass(frozen=True)
class ConvergenceReport:
    scenario: str
    reach: ReachResult
    lyapunov: LyapunovResult
    invariance: InvarianceResult
    steady_state: SteadyStateResult

    @property
    def passed(self) -> bool:
        """Every gating verdict; the ``2^i`` comparison never gates."""
        return (self.reach.passed and self.lyapunov.passed and self.invariance.passed
                and self.steady_state.corrected_pass)

    def failures(self) -> list[str]:
        out = []
        if not self.reach.passed:
            out.append("reach")
        if not self.lyapunov.passed:
            out.append("lyapunov")
        if not self.invariance.passed:
            out.append("invariance")
        if not self.steady_state.corrected_pass:
            out.append("steady_state")
        return out

    def to_dict(self) -> dict:
        def rec(obj, rename):
            d = dataclasses.asdict(obj)
            for old, new in rename.items():
                d[new] = d.pop(old)
            return d

        tol = {
            "reach_tol": self.reach.tol,
            "lyapunov_tol": self.lyapunov.tol,
            "steady_rel": self.steady_state.tol_rel,
            "invariance_rel": self.invariance.tol_rel,
        }
        reach = rec(self.reach, {"passed": "pass"})
        for k in ("tol", "dt"):
            reach.pop(k)
        lyap = rec(self.lyapunov, {"passed": "pass"})
        inv = rec(self.invariance, {"passed": "pass"})
        for k in ("phi", "tol_rel"):
            inv.pop(k)
        steady = dataclasses.asdict(self.steady_state)
        steady.pop("tol_rel")
        for k in ("max_abs_error", "corrected_bounds", "slotine_bounds"):
            steady[k] = list(steady[k])
        return {
            "scenario": self.scenario,
            "passed": self.passed,
            "reach": reach,
            "lyapunov": lyap,
            "invariance": inv,
            "steady_state": steady,
            "tolerances": tol,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=True) + "\n"

    def to_text(self) -> str:
        r, ly, inv, st = self.reach, self.lyapunov, self.invariance, self.steady_state
        ok = {True: "PASS", False: "FAIL"}
        t_obs = "never" if r.t_reach_observed is None else f"{r.t_reach_observed:.6g}"
        lines = [
            f"scenario: {self.scenario}",
            f"  reach       {ok[r.passed]}  t_reach={t_obs}  bound=|s_phi(0)|/eta={r.t_reach_bound:.6g}"
            f"  envelope_excess={r.envelope_max_violation:.3g}",
            f"  lyapunov    {ok[ly.passed]}  max(V'+eta|s_phi|)={ly.max_violation:.3g}"
            f"  tol={ly.tol:.3g}  samples={ly.samples}",
            f"  invariance  {ok[inv.passed]}  max|s|={inv.max_abs_s:.6g}  phi={inv.phi:.6g}",
            f"  steady      corrected={ok[st.corrected_pass]}  slotine={ok[st.slotine_pass]}"
            f"  (tail from t={st.t_from:.6g})",
            f"    {'i':>3} {'max|e^(i)|':>14} {'zeta bound':>14} {'2^i bound':>14}",
        ]
        for i, (m, c, s) in enumerate(zip(st.max_abs_error, st.corrected_bounds, st.slotine_bounds)):
            lines.append(f"    {i:>3} {m:>14.6g} {c:>14.6g} {s:>14.6g}")
        lines.append(f"  overall     {ok[self.passed]}")
        return "\n".join(lines) + "\n"


def verify_run(log: TrajectoryLog, cfg: ControllerConfig, tail_fraction: float = 0.4, *,
               scenario: str = "run", reach_tol: float = 1e-4, lyapunov_tol: float | None = None,
               steady_rel: float = 1e-2, invariance_rel: float = 1e-3) -> ConvergenceReport:
    reach = check_reaching(log, cfg.eta, reach_tol)
    lyap = check_lyapunov(log, cfg.eta, lyapunov_tol)
    inv = check_invariance(log, cfg.phi, reach.t_reach_observed, invariance_rel)
    gate = reach.t_reach_bound + SETTLING_TIME_CONSTANTS / cfg.surface.lam
    steady = check_steady_state(log, region(cfg.surface, cfg.phi),
                                slotine_region(cfg.surface, cfg.phi), tail_fraction,
                                gate=gate, tol_rel=steady_rel)
    return ConvergenceReport(scenario, reach, lyap, inv, steady)
