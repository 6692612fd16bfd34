"""Command-line front end: config parsing, dispatch, and report writers.

Configs are flat key-value text, one `key = value` per line with dotted
sections and `#` comments.  Unknown keys are rejected before any compute.
Run reports are written as CSV with the frozen column order

    equation,m,nu,n_cut,t,sup_norm,holder_norm,bound,slack,residual,wall_ms

(all floats at 17 significant digits) next to a JSON manifest holding the
full config echo, its sha256 hash, the library version, the grid and the
schedule constants.  Exit codes: 0 ok, 2 malformed config, 3 numerical
instability.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InstabilityError, ResolutionError
from .fields import (abs_field, constant_field, gaussian_field, ramp_field,
                     sign_field, sine_field, sqrt_abs_field)
from .flows import DriftSpec
from .grid import Domain1D, GridField
from .experiments import (CSV_COLUMNS, RunReport, burgers_steady_state,
                          condinu_nu_for, config_hash, holder_bound_sweep,
                          peano_selection, uniqueness_gap)
from .schedules import (ScheduleConstants, condinu_transport,
                        uniqueness_window_transport)
from .solver import SolveConfig
from .spaces import besov_norm_thermic, holder_norm_b, holder_seminorm

SUBCOMMANDS = ("solve", "sweep-holder", "sweep-unique", "burgers-steady",
               "peano", "norms", "schedule", "report")


class ConfigError(Exception):
    """Carries field-level diagnostics for exit code 2."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


# ---------------------------------------------------------------- schema

def _float(s):
    return float(s)


def _int(s):
    return int(s)


# key: (parser, default); "floats" parses a comma-separated list.
# A None default means the key is only present when the config sets it.
_COMMON = {
    "output.dir": (str, "."),
    "output.prefix": (str, "run"),
    "grid.half_length": (_float, 4.0),
    "grid.points": (_int, 512),
    "run.horizon": (_float, 0.5),
    "run.gamma": (_float, 0.5),
    "solve.dt_policy": (_float, 0.4),
    "solve.n_cut": (_int, 1),
    "solve.frames": (_int, 200),
    "solve.dt_override": (_float, None),
    "equation": (str, "transport"),
    "mollifier.family": (str, "gaussian"),
    "mollifier.m": (_float, 16.0),
    "nu.value": (_float, 1e-3),
    "nu.policy": (str, "fixed"),
    "m.list": ("floats", None),
    "drift.family": (str, "constant"),
    "drift.c": (_float, 0.0),
    "drift.slope": (_float, 0.5),
    "drift.gamma_tilde": (_float, 0.5),
    "drift.radius": (_float, 1.0),
    "data.g.family": (str, "gaussian"),
    "data.g.scale": (_float, 1.0),
    "data.g.variance": (_float, 0.2),
    "data.g.mode": (_int, 4),
    "data.f.family": (str, "zero"),
    "data.f.scale": (_float, 1.0),
    "data.f.variance": (_float, 0.2),
    "data.f.mode": (_int, 4),
    "schedule.c": (_float, 1.0),
    "schedule.eps_ll": (_float, 0.1),
    "schedule.kind": (str, "condinu"),
    "unique.gamma_tilde": (_float, 0.9),
    "report.input": (str, None),
    "norm.kind": (str, "holder"),
    "norm.exponent": (_float, 0.5),
}

_REQUIRED = {
    "sweep-holder": ("m.list",),
    "sweep-unique": ("m.list",),
    "schedule": ("m.list",),
    "peano": ("m.list",),
    "report": ("report.input",),
}


def parse_config_text(text: str) -> dict[str, str]:
    """Flat `key = value` lines into a raw string mapping."""
    raw = {}
    problems = []
    for ln, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            problems.append(f"line {ln}: expected 'key = value', got {stripped!r}")
            continue
        key, val = stripped.split("=", 1)
        key = key.strip()
        if key in raw:
            problems.append(f"line {ln}: duplicate key {key!r}")
        raw[key] = val.strip()
    if problems:
        raise ConfigError(problems)
    return raw


def validate_config(raw: dict[str, str], subcommand: str) -> dict:
    """Type-check against the schema; unknown keys are rejected."""
    problems = []
    config = {}
    for key, val in raw.items():
        if key not in _COMMON:
            problems.append(f"unknown key {key!r}")
            continue
        parser, _ = _COMMON[key]
        try:
            if parser == "floats":
                config[key] = [float(p) for p in val.split(",") if p.strip()]
                if not config[key]:
                    raise ValueError("empty list")
            else:
                config[key] = parser(val)
        except ValueError as exc:
            problems.append(f"key {key!r}: cannot parse {val!r} ({exc})")
    for key in _REQUIRED.get(subcommand, ()):
        if key not in config:
            problems.append(f"missing required key {key!r} for {subcommand}")
    if problems:
        raise ConfigError(problems)
    for key, (_, default) in _COMMON.items():
        if key not in config and default is not None:
            config[key] = default
    return config


def load_config(path, subcommand: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError([f"cannot read config {path}: {exc}"])
    raw = parse_config_text(text)
    if not raw:
        required = list(_REQUIRED.get(subcommand, ()))
        raise ConfigError(
            [f"empty config; required keys: {required or 'none'}; "
             f"known keys: {', '.join(sorted(_COMMON))}"])
    return validate_config(raw, subcommand)


# ---------------------------------------------------------------- builders

def _domain(config) -> Domain1D:
    return Domain1D(config["grid.half_length"], config["grid.points"])


def _field_from(config, prefix: str, domain: Domain1D) -> GridField | None:
    family = config[f"data.{prefix}.family"]
    scale = config[f"data.{prefix}.scale"]
    if family == "zero":
        return None if prefix == "f" else constant_field(domain, 0.0)
    if family == "constant":
        return constant_field(domain, scale)
    if family == "gaussian":
        return scale * gaussian_field(domain, config[f"data.{prefix}.variance"])
    if family == "sqrt_abs":
        return scale * sqrt_abs_field(domain)
    if family == "abs":
        return scale * abs_field(domain)
    if family == "ramp":
        return ramp_field(domain, scale)
    if family == "sine":
        return scale * sine_field(domain, config[f"data.{prefix}.mode"])
    if family == "sign":
        return sign_field(domain, scale)
    raise ConfigError([f"data.{prefix}.family: unknown family {family!r}"])


def _drift_from(config) -> DriftSpec:
    family = config["drift.family"]
    if family == "constant":
        return DriftSpec.constant(config["drift.c"])
    if family == "linear":
        return DriftSpec.linear(config["drift.slope"], window=(2.0, 3.0))
    if family == "peano":
        return DriftSpec.peano(config["drift.gamma_tilde"], config["drift.radius"])
    raise ConfigError([f"drift.family: unknown family {family!r}"])


def _solve_config(config, domain) -> SolveConfig:
    equation = config["equation"]
    drift = _drift_from(config) if equation == "transport" else None
    return SolveConfig(
        equation=equation, drift=drift, m=config["mollifier.m"],
        nu=config["nu.value"], horizon=config["run.horizon"],
        gamma=config["run.gamma"], grid=domain,
        dt_policy=config["solve.dt_policy"], n_cut=config["solve.n_cut"],
        mollifier_family=config["mollifier.family"],
        frames_target=config["solve.frames"],
        dt_override=config["solve.dt_override"] if "solve.dt_override" in config else None)


def _data_norms(config, domain, f, g):
    gamma = config["run.gamma"]
    window = (-domain.half_length / 2, domain.half_length / 2)
    g_sem = holder_seminorm(g, gamma, window).value if g is not None else 0.0
    if f is None:
        f_hold = 0.0
    else:
        f_hold = holder_norm_b(f, gamma, window).value
    return f_hold, g_sem


# ---------------------------------------------------------------- writers

def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def write_rows_csv(path, columns, rows):
    with open(path, "w") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def write_report(report: RunReport, out_dir, prefix: str):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = write_rows_csv(out_dir / f"{prefix}.csv", CSV_COLUMNS,
                              [r.as_tuple() for r in report.rows])
    manifest_path = out_dir / f"{prefix}.manifest.json"
    manifest_path.write_text(json.dumps(report.manifest, indent=2, sort_keys=True))
    return csv_path, manifest_path


def _manifest_for(config, domain, extra=None):
    man = {
        "config": dict(sorted(config.items())),
        "config_hash": config_hash(config),
        "version": __version__,
        "grid": {"half_length": domain.half_length, "points": domain.points,
                 "dx": domain.dx},
        "constants": {"C": config["schedule.c"], "eps_ll": config["schedule.eps_ll"]},
    }
    if extra:
        man.update(extra)
    return man


# ---------------------------------------------------------------- commands

def _cmd_solve(config) -> int:
    domain = _domain(config)
    cfg = _solve_config(config, domain)
    g = _field_from(config, "g", domain)
    f = _field_from(config, "f", domain)
    f_hold, g_sem = _data_norms(config, domain, f, g)
    report = holder_bound_sweep([cfg], f, g, f_hold, g_sem,
                                n_time_samples=8, config_echo=config)
    report.manifest = _manifest_for(config, domain,
                                    {"boundary_sup": report.manifest.get("boundary_sup", 0.0)})
    bad = [r for r in report.rows if math.isnan(r.t)]
    csv_path, man_path = write_report(report, config["output.dir"],
                                      config["output.prefix"])
    print(f"wrote {csv_path} and {man_path}")
    if bad:
        print("instability: offending row recorded with NaN fields", file=sys.stderr)
        return 3
    return 0


def _cmd_sweep_holder(config) -> int:
    domain = _domain(config)
    base = _solve_config(config, domain)
    g = _field_from(config, "g", domain)
    f = _field_from(config, "f", domain)
    f_hold, g_sem = _data_norms(config, domain, f, g)
    consts = ScheduleConstants(
        gamma=config["run.gamma"], beta=-config["drift.gamma_tilde"],
        horizon=config["run.horizon"], f_holder=f_hold, g_seminorm=g_sem,
        C=config["schedule.c"], eps_ll=config["schedule.eps_ll"])
    configs = []
    for m in config["m.list"]:
        nu = config["nu.value"] if config["nu.policy"] == "fixed" \
            else condinu_nu_for(m, consts)
        configs.append(dataclasses.replace(base, m=float(m), nu=nu))
    report = holder_bound_sweep(configs, f, g, f_hold, g_sem, config_echo=config)
    report.manifest = _manifest_for(config, domain,
                                    {"boundary_sup": report.manifest.get("boundary_sup", 0.0)})
    csv_path, man_path = write_report(report, config["output.dir"],
                                      config["output.prefix"])
    print(f"wrote {csv_path} and {man_path}")
    if any(math.isnan(r.t) for r in report.rows):
        print("instability: offending row recorded with NaN fields", file=sys.stderr)
        return 3
    return 0


def _cmd_sweep_unique(config) -> int:
    domain = _domain(config)
    gamma = config["run.gamma"]
    gamma_t = config["unique.gamma_tilde"]
    base = dataclasses.replace(_solve_config(config, domain),
                               drift=DriftSpec.peano(gamma_t))
    g = _field_from(config, "g", domain)
    f = _field_from(config, "f", domain)
    nu_pairs = {}
    for m in config["m.list"]:
        win = uniqueness_window_transport(m, gamma, gamma_t,
                                          eps_ll=config["schedule.eps_ll"])
        if win.empty:
            nu_pairs[m] = (config["nu.value"], config["nu.value"] / 4)
        else:
            nu_pairs[m] = (win.pick(0.75), win.pick(0.4))
    _, report = uniqueness_gap(base, f, g, config["m.list"], nu_pairs)
    report.manifest = _manifest_for(config, domain)
    csv_path, man_path = write_report(report, config["output.dir"],
                                      config["output.prefix"])
    print(f"wrote {csv_path} and {man_path}")
    return 0


def _cmd_burgers_steady(config) -> int:
    res = burgers_steady_state(nu=config["nu.value"],
                               horizon=config["run.horizon"],
                               points=config["grid.points"],
                               m=config["mollifier.m"],
                               half_length=config["grid.half_length"],
                               dt_policy=config["solve.dt_policy"])
    res.report.manifest = _manifest_for(config, Domain1D(
        config["grid.half_length"], config["grid.points"]),
        {"error_odd": res.error_odd, "error_even": res.error_even,
         "final_drift_rate": res.final_drift_rate})
    csv_path, man_path = write_report(res.report, config["output.dir"],
                                      config["output.prefix"])
    print(f"steady-state sup error (odd branch): {res.error_odd:.6g}")
    print(f"wrote {csv_path} and {man_path}")
    return 0


def _cmd_peano(config) -> int:
    domain = _domain(config)
    base = _solve_config(config, domain)
    g = _field_from(config, "g", domain)
    f = _field_from(config, "f", domain)
    consts = ScheduleConstants(
        gamma=config["run.gamma"], beta=-config["drift.gamma_tilde"],
        horizon=config["run.horizon"],
        f_holder=1.0 if f is not None else 0.0, g_seminorm=1.0,
        C=config["schedule.c"], eps_ll=config["schedule.eps_ll"])
    diag = peano_selection(config["drift.gamma_tilde"], config["m.list"], base,
                           f, g, lambda m: condinu_nu_for(m, consts),
                           parity="even" if config["data.g.family"] in
                           ("gaussian", "sqrt_abs", "abs", "constant") else "odd")
    out_dir = Path(config["output.dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for i, t in enumerate(diag.sample_times):
        for k in range(diag.tail_diameters.shape[1]):
            rows.append((t, diag.pairs[k][0], diag.tail_diameters[i, k],
                         diag.symmetry_defect))
    csv_path = write_rows_csv(out_dir / f"{config['output.prefix']}.csv",
                              ("t", "tail_m_from", "tail_diameter",
                               "symmetry_defect"), rows)
    man = _manifest_for(config, domain, {"pairs": diag.pairs})
    man_path = out_dir / f"{config['output.prefix']}.manifest.json"
    man_path.write_text(json.dumps(man, indent=2, sort_keys=True))
    print(f"wrote {csv_path} and {man_path}")
    return 0


def _cmd_norms(config) -> int:
    domain = _domain(config)
    g = _field_from(config, "g", domain)
    kind = config["norm.kind"]
    expo = config["norm.exponent"]
    if kind == "holder":
        est = holder_seminorm(g, expo)
        homog, low = est.value, 0.0
    elif kind == "besov":
        est = besov_norm_thermic(g, expo)
        homog, low = est.homogeneous, est.low_frequency
    else:
        raise ConfigError([f"norm.kind: unknown kind {kind!r}"])
    out_dir = Path(config["output.dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = write_rows_csv(
        out_dir / f"{config['output.prefix']}.csv",
        ("kind", "exponent", "value", "homogeneous", "low_frequency"),
        [(kind, expo, est.value, homog, low)])
    print(f"{kind}({expo:g}) = {est.value:.17g}")
    print(f"wrote {csv_path}")
    return 0


def _cmd_schedule(config) -> int:
    kind = config["schedule.kind"]
    gamma = config["run.gamma"]
    consts = ScheduleConstants(gamma=gamma, beta=-config["drift.gamma_tilde"],
                               horizon=config["run.horizon"],
                               C=config["schedule.c"],
                               eps_ll=config["schedule.eps_ll"])
    rows = []
    if kind == "condinu":
        for m in config["m.list"]:
            nu_max = condinu_transport(m, consts)
            print(f"m={m:g}: nu_max = {nu_max:.17g}")
            rows.append((m, nu_max, math.nan, math.nan))
    elif kind == "uniqueness-window":
        for m in config["m.list"]:
            win = uniqueness_window_transport(m, gamma,
                                              config["unique.gamma_tilde"],
                                              eps_ll=config["schedule.eps_ll"])
            lo, hi = (math.nan, math.nan) if win.empty else (win.nu_lo, win.nu_hi)
            print(f"m={m:g}: window = [{lo:.6g}, {hi:.6g}]"
                  + (" (empty)" if win.empty else ""))
            rows.append((m, math.nan, lo, hi))
    else:
        raise ConfigError([f"schedule.kind: unknown kind {kind!r}"])
    out_dir = Path(config["output.dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = write_rows_csv(out_dir / f"{config['output.prefix']}.csv",
                              ("m", "nu_max", "window_lo", "window_hi"), rows)
    print(f"wrote {csv_path}")
    return 0


def _cmd_report(config) -> int:
    from .figures import render_report

    try:
        out = render_report(config["report.input"], config["output.dir"])
    except (OSError, ValueError) as exc:
        raise ConfigError([f"report.input: {exc}"])
    for p in out:
        print(f"wrote {p}")
    if not out:
        print("no renderable columns found", file=sys.stderr)
    return 0


_DISPATCH = {
    "solve": _cmd_solve,
    "sweep-holder": _cmd_sweep_holder,
    "sweep-unique": _cmd_sweep_unique,
    "burgers-steady": _cmd_burgers_steady,
    "peano": _cmd_peano,
    "norms": _cmd_norms,
    "schedule": _cmd_schedule,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="vvlab",
        description="vanishing-viscosity laboratory for rough transport, "
                    "parabolic and Burgers equations")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("config", help="path to a key = value config file")
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config, args.subcommand)
        return _DISPATCH[args.subcommand](config)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2
    except (InstabilityError, ResolutionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
