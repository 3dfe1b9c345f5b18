"""Machine-checked verdicts for the reaching, decrement and steady-state
properties, plus the worst-case witness search."""

from .checks import (InvarianceResult, LyapunovResult, ReachResult, SteadyStateResult,
                     check_invariance, check_lyapunov, check_reaching, check_steady_state,
                     lyapunov_constant, tail_start)
from .report import ConvergenceReport, verify_run
from .witness import (BangBangSchedule, ErrorCascade, WitnessResult, search_witness,
                      witness_log)

__all__ = [
    "BangBangSchedule", "ConvergenceReport", "ErrorCascade", "InvarianceResult",
    "LyapunovResult", "ReachResult", "SteadyStateResult", "WitnessResult",
    "check_invariance", "check_lyapunov", "check_reaching", "check_steady_state",
    "lyapunov_constant", "search_witness", "tail_start", "verify_run", "witness_log",
]
