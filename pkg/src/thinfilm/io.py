"""Run configuration, initial data and text persistence (CSV, snapshots).

Config files are INI style::

    [grid]
    n_modes = 128

    [model]
    n = 3
    eps = 1e-3
    M = auto          ; or a number

    [time]
    tau0 = 1e-3
    t_end = 1

    [initial]
    kind = cosine_mix
    level = 1
    modes = 1:0.5, 3:0.1

Keys are case-insensitive; unknown sections or keys are errors.
"""
from __future__ import annotations

import configparser
import csv
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .mobility import MobilityModel
from .spectral import CosineField, GridSpec, analyze
from .stepper import RunConfig, Trajectory, default_cap

FORMAT_VERSION = 1

CSV_COLUMNS = ("t", "mass", "energy", "entropy_G", "entropy_Geps", "H_eps",
               "dissipation_cum", "min_u", "max_u", "tau", "picard_iters", "monitors_ok")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class InitialCondition:
    """Initial profile descriptor.

    kinds: ``constant`` (level), ``cosine_mix`` (level + sum amp*phi_k),
    ``bump`` (height*(1-s^2)^2 on |s|<1, s=(x-center)/width, a C1 profile
    with compact support), ``lifted`` (a base descriptor plus delta).
    """

    kind: str = "constant"
    level: float = 1.0
    modes: tuple = ()
    center: float = 0.5
    width: float = 0.25
    height: float = 1.0
    delta: float = 0.0
    base: "InitialCondition | None" = None

    def __post_init__(self):
        if self.kind not in ("constant", "cosine_mix", "bump", "lifted"):
            raise ValueError(f"unknown initial condition kind {self.kind!r}")
        if self.kind == "bump":
            if self.width <= 0 or self.height < 0:
                raise ValueError("bump needs width > 0 and height >= 0")
        if self.kind == "lifted" and self.base is None:
            raise ValueError("lifted initial condition needs a base")

    def build(self, grid: GridSpec) -> CosineField:
        if self.kind == "constant":
            return CosineField.constant(self.level, grid)
        if self.kind == "cosine_mix":
            c = np.zeros(grid.n_modes + 1)
            c[0] = self.level
            for k, amp in self.modes:
                if not 1 <= k <= grid.n_modes:
                    raise ValueError(f"mode {k} outside 1..{grid.n_modes}")
                c[k] += amp
            return CosineField(c, grid)
        if self.kind == "bump":
            fine = GridSpec(grid.n_modes, 4 * grid.n_quad)
            return CosineField(analyze(self.bump_profile(fine.nodes), fine).coeffs, grid)
        return self.base.build(grid) + self.delta

    def bump_profile(self, x):
        s = (np.asarray(x, dtype=float) - self.center) / self.width
        return np.where(np.abs(s) < 1.0, self.height * (1.0 - s * s) ** 2, 0.0)


_SCHEMA = {
    "grid": {"n_modes": int, "n_quad": int},
    "model": {"n": float, "eps": float, "m": str, "anchor": float},
    "time": {"tau0": float, "t_end": float, "picard_max": int, "picard_tol": float,
             "tau_floor": float, "restore_after": int},
    "monitor": {"stat_slack": float, "slack": float, "enforce": str},
    "initial": {"kind": str, "level": float, "modes": str, "center": float,
                "width": float, "height": float, "delta": float, "base": str},
    "output": {"path": str},
}

DEFAULT_N_MODES = 128
DEFAULT_TAU0 = 1e-3


def _parse_modes(text: str) -> tuple:
    out = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        k, _, amp = item.partition(":")
        if not amp:
            raise ConfigError(f"malformed mode entry {item!r} (expected k:amplitude)")
        out.append((int(k), float(amp)))
    return tuple(out)


def _initial_from(sec: dict) -> InitialCondition:
    kind = sec.get("kind", "constant")
    common = {k: sec[k] for k in ("level", "center", "width", "height") if k in sec}
    modes = _parse_modes(sec["modes"]) if "modes" in sec else ()
    if kind == "lifted":
        base = InitialCondition(kind=sec.get("base", "bump"), modes=modes, **common)
        return InitialCondition(kind="lifted", delta=sec.get("delta", 0.0), base=base)
    return InitialCondition(kind=kind, modes=modes, **common)


def parse_config_text(text: str, overrides: dict | None = None) -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"),
                                       interpolation=None)
    try:
        parser.read_string(text)
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(f"malformed line {lineno}: {line.strip()!r}") from exc
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    values: dict = {}
    for section in parser.sections():
        if section.lower() not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        schema = _SCHEMA[section.lower()]
        sec = values.setdefault(section.lower(), {})
        for key, raw in parser.items(section):
            if key not in schema:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            try:
                sec[key] = schema[key](raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc
    for key, val in (overrides or {}).items():
        if val is None:
            continue
        section = next(s for s, keys in _SCHEMA.items() if key in keys)
        values.setdefault(section, {})[key] = val

    g = values.get("grid", {})
    grid = GridSpec(g.get("n_modes", DEFAULT_N_MODES), g.get("n_quad", 0))
    initial = _initial_from(values.get("initial", {}))
    u0 = initial.build(grid)
    m = values.get("model", {})
    n = m.get("n", 3.0)
    cap = m.get("m", "auto")
    if str(cap).strip().lower() == "auto":
        cap_value, policy = default_cap(u0, n), "auto"
    else:
        try:
            cap_value, policy = float(cap), "fixed"
        except ValueError as exc:
            raise ConfigError(f"bad value for 'M': {cap!r}") from exc
    eps = m.get("eps", 1e-3)
    if not eps < cap_value:
        raise ConfigError("eps < M required")
    try:
        model = MobilityModel(n=n, eps=eps, cap_M=cap_value, anchor=m.get("anchor", 1.0))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    t = values.get("time", {})
    mon = values.get("monitor", {})
    kwargs = dict(tau0=t.get("tau0", DEFAULT_TAU0), t_end=t.get("t_end", 1.0))
    for key in ("picard_max", "picard_tol", "tau_floor", "restore_after"):
        if key in t:
            kwargs[key] = t[key]
    if "stat_slack" in mon:
        kwargs["stat_slack"] = mon["stat_slack"]
    if "slack" in mon:
        kwargs["monitor_slack"] = mon["slack"]
    if "enforce" in mon:
        kwargs["enforce"] = tuple(s.strip() for s in mon["enforce"].split(",") if s.strip())
    try:
        cfg = RunConfig(grid=grid, model=model, initial=initial, **kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return replace(cfg, cap_policy=policy, output=values.get("output", {}).get("path", ""))


def parse_config(path, overrides: dict | None = None) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_config_text(path.read_text(), overrides)


def _fmt(x) -> str:
    return repr(float(x))


def emit_trajectory_csv(traj: Trajectory, path) -> None:
    """One row per accepted step; floats written at full (round-trip) precision."""
    cum = 0.0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for rep in traj.reports:
            s = rep.snapshot
            cum += s.dissipation_increment
            w.writerow([_fmt(s.t), _fmt(s.mass), _fmt(s.energy), _fmt(s.entropy_G),
                        _fmt(s.entropy_Geps), _fmt(s.H_eps), _fmt(cum), _fmt(s.min_u),
                        _fmt(s.max_u), _fmt(rep.tau_used), str(rep.picard_iters),
                        "1" if rep.monitors_ok else "0"])


def read_trajectory_csv(path) -> dict:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {c: np.array([float(r[c]) for r in rows]) for c in CSV_COLUMNS}


def write_snapshot(u: CosineField, path, model: MobilityModel | None = None,
                   t: float = 0.0) -> None:
    lines = [f"format = {FORMAT_VERSION}", f"N = {u.grid.n_modes}",
             f"n_quad = {u.grid.n_quad}"]
    if model is not None:
        lines += [f"n = {model.n!r}", f"eps = {model.eps!r}", f"M = {model.cap_M!r}"]
    lines += [f"t = {float(t)!r}", "---"]
    lines += [f"{c:.17g}" for c in u.coeffs]
    Path(path).write_text("\n".join(lines) + "\n")


def read_snapshot(path):
    """Returns (field, header dict)."""
    text = Path(path).read_text().split("\n")
    sep = text.index("---")
    header = {}
    for line in text[:sep]:
        k, _, v = line.partition("=")
        header[k.strip()] = v.strip()
    if int(header.get("format", -1)) != FORMAT_VERSION:
        raise ValueError(f"unsupported snapshot format {header.get('format')}")
    coeffs = [float(s) for s in text[sep + 1:] if s.strip()]
    grid = GridSpec(int(header["N"]), int(header.get("n_quad", 0)))
    return CosineField(np.array(coeffs), grid), header
