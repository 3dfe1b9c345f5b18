"""Scenario files: flat ``key = value`` text grouped under ``[section]`` headers.

Every key, its unit and its constraint are listed in ``scenarios/SCHEMA.md``.
Parsing is total: any input either yields a :class:`ScenarioConfig` or raises
:class:`ConfigError` naming the offending section, key and line.
"""

from __future__ import annotations

import configparser
import dataclasses
import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import plant_sim
from .controller import ControllerConfig, UncertaintyModel
from .plant_sim import DesiredTrajectory, PlantModel
from .smoothing import SmoothingKind
from .surface import MAX_ORDER, make_surface

SHIPPED = ("duffing_n2.cfg", "chain_n3.cfg", "varying_gain_n2.cfg")
FIXTURES = ("undergained_n2.cfg",)


class ConfigError(ValueError):
    def __init__(self, message: str, *, section: str | None = None,
                 key: str | None = None, line: int | None = None, source: str = "<config>"):
        self.section, self.key, self.line, self.source = section, key, line, source
        where = source
        if line is not None:
            where += f":{line}"
        if section is not None:
            where += f" [{section}]" + (f" {key}" if key else "")
        super().__init__(f"{where}: {message}")


_TRAJECTORY_KEYS = {
    "sine": {"amplitude": 1.0, "omega": 1.0, "phase": 0.0, "offset": 0.0},
    "smooth_step": {"height": 1.0, "t0": 1.0, "width": 0.5, "offset": 0.0},
    "constant": {"value": 0.0},
}

_SCHEMA = {
    "scenario": {"name", "description"},
    "plant": {"family", "params", "b0", "b_var", "d_const", "d_amp", "d_freq"},
    "uncertainty": {"params_hat", "param_err", "d_bound", "f_scale", "f_offset", "b_min", "b_max"},
    "controller": {"n", "lambda", "eta", "phi", "smoothing", "gain_safety"},
    "trajectory": {"kind"} | {k for keys in _TRAJECTORY_KEYS.values() for k in keys},
    "run": {"x0", "dt", "t_end", "substeps", "tail_fraction"},
    "output": {"csv", "report", "envelope_csv", "region_csv"},
}
_REQUIRED_SECTIONS = ("plant", "uncertainty", "controller", "trajectory", "run")


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    family: str
    params: tuple[float, ...]
    b0: float
    b_var: float
    d_const: float
    d_amp: float
    d_freq: float
    params_hat: tuple[float, ...]
    param_err: tuple[float, ...]
    d_bound: float
    f_scale: float
    f_offset: float
    b_min: float
    b_max: float
    n: int
    lam: float
    eta: float
    phi: float
    smoothing: SmoothingKind
    gain_safety: float
    trajectory_kind: str
    trajectory_params: tuple[tuple[str, float], ...]
    x0: tuple[float, ...]
    t_end: float
    dt: float | None = None
    substeps: int = 1
    tail_fraction: float = 0.4
    csv: str | None = None
    report: str | None = None
    envelope_csv: str | None = None
    region_csv: str | None = None
    source: str = "<config>"

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class Scenario:
    """A fully built, runnable scenario."""

    config: ScenarioConfig
    plant: PlantModel
    uncertainty: UncertaintyModel
    trajectory: DesiredTrajectory
    controller: ControllerConfig
    x0: np.ndarray
    dt: float

    @property
    def name(self) -> str:
        return self.config.name

    @property
    def t_end(self) -> float:
        return self.config.t_end

    def simulate(self, **kwargs) -> plant_sim.TrajectoryLog:
        kwargs.setdefault("substeps", self.config.substeps)
        return plant_sim.simulate(self.plant, self.controller, self.trajectory, self.x0,
                                  self.t_end, self.dt, **kwargs)


class _Reader:
    def __init__(self, parser: configparser.ConfigParser, lines: dict, source: str):
        self.p, self.lines, self.source = parser, lines, source

    def error(self, msg, section=None, key=None):
        line = self.lines.get((section, key)) if key else self.lines.get((section, None))
        return ConfigError(msg, section=section, key=key, line=line, source=self.source)

    def raw(self, section, key, default=None, required=False):
        if self.p.has_section(section) and self.p.has_option(section, key):
            return self.p.get(section, key).strip()
        if required:
            raise self.error(f"missing required key {key!r}", section)
        return default

    def real(self, section, key, default=None, *, required=False, rule=None):
        text = self.raw(section, key, required=required)
        if text is None:
            return default
        try:
            value = float(text)
        except ValueError:
            raise self.error(f"expected a real number, got {text!r}", section, key) from None
        if not math.isfinite(value):
            raise self.error(f"must be finite, got {text!r}", section, key)
        if rule is not None:
            ok, desc = rule
            if not ok(value):
                raise self.error(f"must be {desc}, got {value!r}", section, key)
        return value

    def integer(self, section, key, default=None, *, required=False, lo=None, hi=None):
        text = self.raw(section, key, required=required)
        if text is None:
            return default
        if not re.fullmatch(r"[+-]?\d+", text):
            raise self.error(f"expected an integer, got {text!r}", section, key)
        value = int(text)
        if (lo is not None and value < lo) or (hi is not None and value > hi):
            raise self.error(f"must lie in [{lo}, {hi}], got {value}", section, key)
        return value

    def vector(self, section, key, *, required=False):
        text = self.raw(section, key, default="", required=required)
        if not text:
            return ()
        out = []
        for part in text.split(","):
            try:
                v = float(part)
            except ValueError:
                raise self.error(f"expected comma-separated reals, got {part.strip()!r}",
                                 section, key) from None
            if not math.isfinite(v):
                raise self.error(f"entries must be finite, got {part.strip()!r}", section, key)
            out.append(v)
        return tuple(out)


_POSITIVE = (lambda v: v > 0.0, "> 0")
_NONNEG = (lambda v: v >= 0.0, ">= 0")
_FRACTION = (lambda v: 0.0 < v < 1.0, "in (0, 1)")


def _line_index(text: str) -> dict:
    """Map (section, key) and (section, None) to 1-based line numbers."""
    index, section = {}, None
    for no, line in enumerate(text.splitlines(), start=1):
        m = re.match(r"\s*\[([^\]]*)\]", line)
        if m:
            section = m.group(1).strip()
            index.setdefault((section, None), no)
            continue
        m = re.match(r"\s*([^=:#;\s][^=:]*?)\s*[=:]", line)
        if m and section is not None:
            index.setdefault((section, m.group(1).strip().lower()), no)
    return index


def parse_scenario(data: str | bytes, source: str = "<config>") -> ScenarioConfig:
    if isinstance(data, (bytes, bytearray)):
        try:
            text = bytes(data).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigError(f"not valid UTF-8 ({exc.reason} at byte {exc.start})",
                              source=source) from None
    else:
        text = data
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        raise ConfigError(msg, line=line, source=source) from None
    except ValueError as exc:  # e.g. embedded NUL bytes
        raise ConfigError(str(exc), source=source) from None
    r = _Reader(parser, _line_index(text), source)

    for section in parser.sections():
        if section not in _SCHEMA:
            raise r.error(f"unknown section; expected one of {sorted(_SCHEMA)}", section)
        for key in parser.options(section):
            if key not in _SCHEMA[section]:
                raise r.error("unknown key", section, key)
    for section in _REQUIRED_SECTIONS:
        if not parser.has_section(section):
            raise ConfigError(f"missing required section [{section}]", source=source)

    family = r.raw("plant", "family", required=True)
    if family not in plant_sim.FAMILIES:
        raise r.error(f"unknown family {family!r}; expected one of {sorted(plant_sim.FAMILIES)}",
                      "plant", "family")
    n = r.integer("controller", "n", required=True, lo=1, hi=MAX_ORDER)
    fam = plant_sim.FAMILIES[family]
    if fam.order_n is not None and fam.order_n != n:
        raise r.error(f"family {family!r} has order {fam.order_n}, but n = {n}", "controller", "n")

    kind = r.raw("trajectory", "kind", required=True)
    if kind not in _TRAJECTORY_KEYS:
        raise r.error(f"unknown kind {kind!r}; expected one of {sorted(_TRAJECTORY_KEYS)}",
                      "trajectory", "kind")
    for key in parser.options("trajectory"):
        if key != "kind" and key not in _TRAJECTORY_KEYS[kind]:
            raise r.error(f"key does not apply to kind {kind!r}", "trajectory", key)
    traj_params = []
    for key, default in _TRAJECTORY_KEYS[kind].items():
        rule = _POSITIVE if key in ("omega", "width") else None
        traj_params.append((key, r.real("trajectory", key, default, rule=rule)))

    smoothing_text = r.raw("controller", "smoothing", default="sat")
    try:
        smoothing = SmoothingKind.parse(smoothing_text)
    except ValueError as exc:
        raise r.error(str(exc), "controller", "smoothing") from None

    cfg = ScenarioConfig(
        name=r.raw("scenario", "name", default=Path(source).stem),
        family=family,
        params=r.vector("plant", "params"),
        b0=r.real("plant", "b0", 1.0, rule=_POSITIVE),
        b_var=r.real("plant", "b_var", 0.0, rule=(lambda v: 0.0 <= v < 1.0, "in [0, 1)")),
        d_const=r.real("plant", "d_const", 0.0),
        d_amp=r.real("plant", "d_amp", 0.0),
        d_freq=r.real("plant", "d_freq", 1.0),
        params_hat=r.vector("uncertainty", "params_hat"),
        param_err=r.vector("uncertainty", "param_err"),
        d_bound=r.real("uncertainty", "d_bound", 0.0, rule=_NONNEG),
        f_scale=r.real("uncertainty", "f_scale", 1.0, rule=_NONNEG),
        f_offset=r.real("uncertainty", "f_offset", 0.0, rule=_NONNEG),
        b_min=r.real("uncertainty", "b_min", required=True, rule=_POSITIVE),
        b_max=r.real("uncertainty", "b_max", required=True, rule=_POSITIVE),
        n=n,
        lam=r.real("controller", "lambda", required=True, rule=_POSITIVE),
        eta=r.real("controller", "eta", required=True, rule=_POSITIVE),
        phi=r.real("controller", "phi", required=True, rule=_POSITIVE),
        smoothing=smoothing,
        gain_safety=r.real("controller", "gain_safety", 1.0, rule=_POSITIVE),
        trajectory_kind=kind,
        trajectory_params=tuple(traj_params),
        x0=r.vector("run", "x0", required=True),
        t_end=r.real("run", "t_end", required=True, rule=_POSITIVE),
        dt=r.real("run", "dt", None, rule=_POSITIVE),
        substeps=r.integer("run", "substeps", 1, lo=1, hi=10_000),
        tail_fraction=r.real("run", "tail_fraction", 0.4, rule=_FRACTION),
        csv=r.raw("output", "csv"),
        report=r.raw("output", "report"),
        envelope_csv=r.raw("output", "envelope_csv"),
        region_csv=r.raw("output", "region_csv"),
        source=source,
    )
    if cfg.b_min > cfg.b_max:
        raise r.error(f"b_min ({cfg.b_min}) must not exceed b_max ({cfg.b_max})", "uncertainty", "b_min")
    for section, key, vec in (("plant", "params", cfg.params),
                              ("uncertainty", "params_hat", cfg.params_hat),
                              ("uncertainty", "param_err", cfg.param_err)):
        if len(vec) != fam.n_params:
            raise r.error(f"family {family!r} needs {fam.n_params} values, got {len(vec)}", section, key)
    if any(v < 0 for v in cfg.param_err):
        raise r.error("entries must be >= 0", "uncertainty", "param_err")
    if len(cfg.x0) != n:
        raise r.error(f"needs {n} entries, got {len(cfg.x0)}", "run", "x0")
    if cfg.dt is not None and cfg.t_end < cfg.dt:
        raise r.error(f"t_end ({cfg.t_end}) must be >= dt ({cfg.dt})", "run", "t_end")
    return cfg


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read file: {exc.strerror}", source=str(path)) from None
    return parse_scenario(data, source=str(path))


def build(cfg: ScenarioConfig) -> Scenario:
    plant = plant_sim.make_plant(cfg.family, cfg.n, cfg.params, b0=cfg.b0, b_var=cfg.b_var,
                                 d_const=cfg.d_const, d_amp=cfg.d_amp, d_freq=cfg.d_freq)
    unc = plant_sim.make_uncertainty(cfg.family, cfg.n, cfg.params_hat, cfg.param_err,
                                     d_bound=cfg.d_bound, f_scale=cfg.f_scale,
                                     f_offset=cfg.f_offset, b_min=cfg.b_min, b_max=cfg.b_max)
    tp = dict(cfg.trajectory_params)
    if cfg.trajectory_kind == "sine":
        traj = plant_sim.sine_trajectory(cfg.n, **tp)
    elif cfg.trajectory_kind == "smooth_step":
        traj = plant_sim.smooth_step_trajectory(cfg.n, **tp)
    else:
        traj = plant_sim.constant_trajectory(cfg.n, **tp)
    ctrl = ControllerConfig(make_surface(cfg.n, cfg.lam), unc, cfg.eta, cfg.phi,
                            cfg.smoothing, cfg.gain_safety)
    x0 = np.array(cfg.x0, dtype=float)
    dt = cfg.dt if cfg.dt is not None else plant_sim.default_dt(plant, ctrl, traj, x0)
    return Scenario(cfg, plant, unc, traj, ctrl, x0, dt)


def shipped_path(filename: str):
    return resources.files("smoothsmc").joinpath("scenarios", filename)


def shipped_scenarios(include_fixtures: bool = False) -> list[Scenario]:
    names = SHIPPED + (FIXTURES if include_fixtures else ())
    out = []
    for name in names:
        ref = shipped_path(name)
        out.append(build(parse_scenario(ref.read_bytes(), source=name)))
    return out
