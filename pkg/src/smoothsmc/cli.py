"""Command-line front end.

Exit codes: 0 success or all checks pass, 1 a verification check failed,
2 usage or scenario-file error, 3 runtime error (divergence or a plant
leaving its declared uncertainty bounds).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import figures
from .bounds import region, zeta_table
from .plant_sim import DivergenceError, ScenarioError
from .scenario import ConfigError, build, load_scenario, shipped_path, SHIPPED
from .smoothing import SmoothingKind
from .surface import MAX_ORDER
from .verify import search_witness, verify_run, witness_log

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


def _order(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if not 1 <= n <= MAX_ORDER:
        raise argparse.ArgumentTypeError(f"order must lie in [1, {MAX_ORDER}], got {n}")
    return n


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a real number, got {text!r}") from None
    if not v > 0 or v == float("inf"):
        raise argparse.ArgumentTypeError(f"must be finite and > 0, got {text!r}")
    return v


def _count(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _load(path: str, args):
    cfg = load_scenario(path)
    changes = {}
    if getattr(args, "dt", None) is not None:
        changes["dt"] = args.dt
    if getattr(args, "t_end", None) is not None:
        changes["t_end"] = args.t_end
    if getattr(args, "smoothing", None) is not None:
        changes["smoothing"] = SmoothingKind.parse(args.smoothing)
    cfg = cfg.replace(**changes)
    if cfg.dt is not None and cfg.t_end < cfg.dt:
        raise ConfigError(f"t_end ({cfg.t_end}) must be >= dt ({cfg.dt})", section="run",
                          key="t_end", source=cfg.source)
    return build(cfg)


def _summary(report) -> str:
    r, st = report.reach, report.steady_state
    t_obs = "never" if r.t_reach_observed is None else f"{r.t_reach_observed:.6g}"
    maxima = ", ".join(f"{v:.4g}" for v in st.max_abs_error)
    return (f"{report.scenario}: t_reach={t_obs} (bound {r.t_reach_bound:.6g}); "
            f"tail max|e^(i)| = [{maxima}]; corrected bounds "
            f"{'hold' if st.corrected_pass else 'VIOLATED'}\n")


def cmd_simulate(args) -> int:
    sc = _load(args.config, args)
    log = sc.simulate()
    out = args.out or sc.config.csv
    if out:
        with open(out, "w", newline="") as fh:
            log.to_csv(fh)
        msg = sys.stdout
    else:
        log.to_csv(sys.stdout)
        msg = sys.stderr
    env = args.envelope_csv or sc.config.envelope_csv
    if env:
        with open(env, "w", newline="") as fh:
            figures.envelope_csv(log, sc.controller.eta, fh)
    reg_out = args.region_csv or sc.config.region_csv
    if reg_out:
        if sc.controller.surface.order_n != 2:
            raise ConfigError("region_csv is only available for n = 2", section="output",
                              key="region_csv", source=sc.config.source)
        with open(reg_out, "w", newline="") as fh:
            figures.region_csv(region(sc.controller.surface, sc.controller.phi), fh)
    try:
        report = verify_run(log, sc.controller, sc.config.tail_fraction, scenario=sc.name)
        msg.write(_summary(report))
    except ValueError as exc:
        msg.write(f"{sc.name}: {exc}\n")
    return EXIT_OK


def _verify_one(path: str, dt, t_end, smoothing):
    args = argparse.Namespace(dt=dt, t_end=t_end, smoothing=smoothing)
    sc = _load(path, args)
    log = sc.simulate()
    report = verify_run(log, sc.controller, sc.config.tail_fraction, scenario=sc.name)
    return report, sc.config.report


def cmd_verify(args) -> int:
    paths = list(args.configs)
    if args.shipped:
        paths += [str(shipped_path(name)) for name in SHIPPED]
    if not paths:
        raise ConfigError("no scenario files given (pass paths or --shipped)", source="verify-bounds")
    jobs = [(p, args.dt, args.t_end, args.smoothing) for p in paths]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_verify_one, *zip(*jobs)))
    else:
        results = [_verify_one(*j) for j in jobs]

    for report, _ in results:
        sys.stdout.write(report.to_text())
        if not report.passed:
            sys.stdout.write(f"  failed checks: {', '.join(report.failures())}\n")
    if args.report:
        payload = [r.to_dict() for r, _ in results]
        Path(args.report).write_text(
            json.dumps(payload[0] if len(payload) == 1 else payload, indent=2) + "\n")
    else:
        for report, path in results:
            if path:
                Path(path).write_text(report.to_json())
    return EXIT_OK if all(r.passed for r, _ in results) else EXIT_FAIL


def cmd_zeta(args) -> int:
    table = zeta_table(args.n)
    w = max(6, len(str(table.zeta[-1])) + 1)
    lines = [f"{'i':>3} {'zeta_i':>{w}} {'2^i':>{w}}"]
    for i, z, p in table.rows():
        lines.append(f"{i:>3} {z:>{w}} {p:>{w}}")
    div = table.first_divergence
    lines.append(f"first divergent index: {'none' if div is None else div}")
    sys.stdout.write("\n".join(lines) + "\n")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["i", "zeta", "slotine"])
            wr.writerows(table.rows())
    return EXIT_OK


def cmd_witness(args) -> int:
    res = search_witness(args.n, args.lam, args.phi, args.i, args.budget,
                         switches=args.switches, seed=args.seed, jobs=args.jobs)
    verdict = "exceeds" if res.exceeds_slotine else "does not exceed"
    sys.stdout.write(
        f"n={res.n} lambda={res.lam:g} phi={res.phi:g} i={res.i}\n"
        f"best tail |e^({res.i})|: {res.best:.10g}  ({res.evaluations} schedules, "
        f"{res.random_evaluations} random)\n"
        f"zeta bound:  {res.corrected_bound:.10g}  "
        f"{'holds' if res.within_corrected() else 'VIOLATED'}\n"
        f"2^i bound:   {res.slotine_bound:.10g}  best {verdict} it\n"
        f"switch times: {', '.join(f'{t:.6g}' for t in res.schedule.switch_times)} "
        f"(initial sign {res.schedule.initial_sign:+d})\n"
    )
    if args.out:
        log = witness_log(res)
        n = res.n
        with open(args.out, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["t", "s"] + [f"e{k}" for k in range(n)])
            for t, s, e in zip(log.t, log.s, log.state):
                wr.writerow([f"{t:.17g}", f"{s:.17g}"] + [f"{v:.17g}" for v in e])
    return EXIT_OK if res.within_corrected() else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="smoothsmc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def run_flags(sp):
        sp.add_argument("--dt", type=_positive, help="control period / log spacing")
        sp.add_argument("--t-end", type=_positive, dest="t_end", help="simulated duration")
        sp.add_argument("--smoothing", choices=[k.value for k in SmoothingKind])

    sp = sub.add_parser("simulate", help="run one scenario and write its trajectory CSV")
    sp.add_argument("config")
    sp.add_argument("--out", help="trajectory CSV path (default: [output] csv, else stdout)")
    sp.add_argument("--envelope-csv", help="write t, |s_phi|, envelope columns")
    sp.add_argument("--region-csv", help="write n = 2 box/layer/region polygons")
    run_flags(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("verify-bounds", help="simulate and check the convergence properties")
    sp.add_argument("configs", nargs="*")
    sp.add_argument("--shipped", action="store_true", help="also run the shipped benchmarks")
    sp.add_argument("--report", help="write the JSON report here")
    sp.add_argument("--jobs", type=_count, default=1)
    run_flags(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("zeta-table", help="print zeta_i next to 2^i")
    sp.add_argument("--n", type=_order, required=True)
    sp.add_argument("--csv")
    sp.set_defaults(func=cmd_zeta)

    sp = sub.add_parser("search-witness", help="worst-case bang-bang search for |e^(i)|")
    sp.add_argument("--n", type=_order, required=True)
    sp.add_argument("--lambda", type=_positive, dest="lam", default=1.0)
    sp.add_argument("--phi", type=_positive, default=1.0)
    sp.add_argument("--i", type=int, required=True)
    sp.add_argument("--budget", type=_count, default=20_000)
    sp.add_argument("--switches", type=_count, default=12)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=_count, default=1)
    sp.add_argument("--out", help="write the witness trajectory CSV")
    sp.set_defaults(func=cmd_witness)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "search-witness" and not 0 <= args.i < args.n:
        parser.error(f"--i must lie in [0, {args.n - 1}]")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ScenarioError, DivergenceError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
