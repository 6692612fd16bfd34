"""Sweeps that turn the a priori estimates into reproducible reports.

Every row carries the config hash of the run that produced it; with the
snapped time step and no randomness anywhere in the compute path, the
slack column is reproducible bit for bit.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__ as _version
from .fields import boundary_sup, sign_field
from .flows import DriftSpec
from .grid import Domain1D, GridField, SpaceTimeField
from .errors import ResolutionError
from .solver import SolveConfig, interior_window, solve_burgers, solve_parabolic
from .spaces import besov_norm_thermic, default_v_grid, holder_seminorm
from .schedules import condinu_transport, ScheduleConstants

__all__ = [
    "RunRow",
    "RunReport",
    "config_hash",
    "worker_count",
    "holder_bound_sweep",
    "uniqueness_gap",
    "burgers_steady_state",
    "peano_selection",
    "time_derivative_besov",
]

CSV_COLUMNS = ("equation", "m", "nu", "n_cut", "t", "sup_norm", "holder_norm",
               "bound", "slack", "residual", "wall_ms")


def config_hash(config: dict) -> str:
    """sha256 of the canonical JSON serialization of a config mapping."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def worker_count() -> int:
    """Worker count for sweep rows, from VVLAB_WORKERS (default 1)."""
    try:
        return max(1, int(os.environ.get("VVLAB_WORKERS", "1")))
    except ValueError:
        return 1


@dataclass
class RunRow:
    equation: str
    m: float
    nu: float
    n_cut: int
    t: float
    sup_norm: float
    holder_norm: float
    bound: float
    slack: float              # bound - holder_norm
    residual: float           # run diagnostic: duhamel residual / gap / steady error
    wall_ms: float

    def as_tuple(self):
        return tuple(getattr(self, c) for c in CSV_COLUMNS)


@dataclass
class RunReport:
    rows: list[RunRow] = field(default_factory=list)
    manifest: dict = field(default_factory=dict)

    def extend(self, rows):
        self.rows.extend(rows)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])


def _map_rows(fn, items):
    n = worker_count()
    if n <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))  # submission order keeps reports deterministic


def _manifest(config: dict, grid: Domain1D, constants: dict | None = None) -> dict:
    return {
        "config": config,
        "config_hash": config_hash(config),
        "version": _version,
        "grid": {"half_length": grid.half_length, "points": grid.points,
                 "dx": grid.dx},
        "constants": constants or {},
    }


def _measure_rows(run: SpaceTimeField, cfg: SolveConfig, f_holder: float,
                  g_seminorm: float, sample_times, wall_ms: float,
                  residual: float = math.nan) -> list[RunRow]:
    window = interior_window(cfg.grid, cfg.m, cfg.nu, cfg.horizon)
    rows = []
    for t in sample_times:
        idx = int(np.argmin(np.abs(run.times - t)))
        fr = run.frame(idx)
        t_actual = float(run.times[idx])
        measured = holder_seminorm(fr, cfg.gamma, window).value
        bound = t_actual * f_holder + g_seminorm
        rows.append(RunRow(
            equation=cfg.equation, m=cfg.m, nu=cfg.nu, n_cut=cfg.n_cut,
            t=t_actual, sup_norm=fr.sup_norm(), holder_norm=measured,
            bound=bound, slack=bound - measured, residual=residual,
            wall_ms=wall_ms))
    return rows


def _solve_any(cfg: SolveConfig, f, g):
    if cfg.equation == "burgers":
        return solve_burgers(cfg, f, g)
    return solve_parabolic(cfg, f, g)


def holder_bound_sweep(configs: list[SolveConfig], f, g: GridField,
                       f_holder: float, g_seminorm: float,
                       n_time_samples: int = 4,
                       config_echo: dict | None = None) -> RunReport:
    """Run each config and record interior Holder norms against the bound
    t * ||f||_{L^inf(C^gamma)} + [g]_gamma, plus sup norms per sampled time.

    Rows for a failing config record NaN instead of aborting the sweep.
    """
    report = RunReport()

    def one(cfg: SolveConfig) -> list[RunRow]:
        t0 = time.perf_counter()
        try:
            run = _solve_any(cfg, f, g)
        except (ResolutionError, RuntimeError):
            return [RunRow(cfg.equation, cfg.m, cfg.nu, cfg.n_cut, math.nan,
                           math.nan, math.nan, math.nan, math.nan, math.nan,
                           (time.perf_counter() - t0) * 1e3)]
        wall = (time.perf_counter() - t0) * 1e3
        samples = np.linspace(0.0, cfg.horizon, n_time_samples + 1)[1:]
        return _measure_rows(run, cfg, f_holder, g_seminorm, samples, wall)

    for rows in _map_rows(one, configs):
        report.extend(rows)
    grid = configs[0].grid if configs else Domain1D()
    report.manifest = _manifest(config_echo or {}, grid)
    report.manifest["boundary_sup"] = boundary_sup(g)
    return report


@dataclass
class GapPoint:
    m: float
    nu: float
    nu_bar: float
    gap: float


def uniqueness_gap(base_cfg: SolveConfig, f, g: GridField, m_list,
                   nu_pairs: dict[float, tuple[float, float]],
                   mollifier_pair: tuple[str, str] = ("gaussian", "compact_bump"),
                   ) -> tuple[list[GapPoint], RunReport]:
    """G(m) = sup_{t,x} |u^{m,nu} - u_bar^{m,nu_bar}| per mollification scale.

    The first run uses mollifier_pair[0] and nu_pairs[m][0]; the second run
    mollifier_pair[1] and nu_pairs[m][1].  Identical inputs give G = 0
    exactly (the runs are bitwise identical).
    """
    points = []
    report = RunReport()
    import dataclasses as _dc
    for m in m_list:
        nu, nu_bar = nu_pairs[m]
        t0 = time.perf_counter()
        cfg_a = _dc.replace(base_cfg, m=float(m), nu=float(nu),
                            mollifier_family=mollifier_pair[0])
        cfg_b = _dc.replace(base_cfg, m=float(m), nu=float(nu_bar),
                            mollifier_family=mollifier_pair[1])
        run_a = _solve_any(cfg_a, f, g)
        run_b = _solve_any(cfg_b, f, g)
        horizon = min(run_a.times[-1], run_b.times[-1])
        probes = np.linspace(0.0, horizon, 9)
        gap = max(float(np.max(np.abs(run_a.sample(t) - run_b.sample(t))))
                  for t in probes)
        wall = (time.perf_counter() - t0) * 1e3
        points.append(GapPoint(float(m), float(nu), float(nu_bar), gap))
        fr = run_a.frame(run_a.n_frames - 1)
        report.rows.append(RunRow(
            equation=base_cfg.equation, m=float(m), nu=float(nu),
            n_cut=base_cfg.n_cut, t=float(run_a.times[-1]),
            sup_norm=fr.sup_norm(), holder_norm=math.nan, bound=math.nan,
            slack=math.nan, residual=gap, wall_ms=wall))
    report.manifest = _manifest({"m_list": list(map(float, m_list))},
                                base_cfg.grid)
    return points, report


@dataclass
class SteadyStateResult:
    error_odd: float       # vs sgn(x)*sqrt|x|, the branch selected from odd data
    error_even: float      # vs sqrt|x| (reported for reference)
    initial_residual: float  # |u du/dx - f| of the closed form at t = 0
    final_drift_rate: float  # sup |u(T) - u(T - dT)| / dT
    report: RunReport


def burgers_steady_state(nu: float = 1e-3, horizon: float = 5.0,
                         points: int = 1024, m: float = 64.0,
                         half_length: float = 4.0,
                         dt_policy: float = 0.4) -> SteadyStateResult:
    """Drive Burgers with f = (1/2) sgn(x) from rest toward the steady state.

    The steady equation u u' = (1/2) sgn(x) is solved by both sqrt|x| and
    sgn(x) sqrt|x|; odd data select the odd branch, which is what the error
    is measured against on [-0.8, -0.1] and [0.1, 0.8].
    """
    dom = Domain1D(half_length, points)
    f = sign_field(dom, 0.5, inner=1.2, outer=2.0)
    g = GridField(dom, np.zeros(points))
    cfg = SolveConfig(equation="burgers", m=m, nu=nu, horizon=horizon,
                      gamma=0.5, grid=dom, dt_policy=dt_policy)
    t0 = time.perf_counter()
    run = solve_burgers(cfg, f, g)
    wall = (time.perf_counter() - t0) * 1e3

    x = dom.x
    mask = (np.abs(x) >= 0.1) & (np.abs(x) <= 0.8)
    u_T = run.values[-1]
    odd_ref = np.sign(x) * np.sqrt(np.abs(x))
    even_ref = np.sqrt(np.abs(x))
    err_odd = float(np.max(np.abs(u_T - odd_ref)[mask]))
    err_even = float(np.max(np.abs(u_T - even_ref)[mask]))

    # steady residual of the closed form itself (centered differences)
    du = np.gradient(odd_ref, dom.dx)
    res0 = float(np.max(np.abs(odd_ref * du - f.values)[mask]))
    dT = run.times[-1] - run.times[-2]
    drift_rate = float(np.max(np.abs(run.values[-1] - run.values[-2])[mask]) / dT)

    row = RunRow(equation="burgers", m=m, nu=nu, n_cut=1,
                 t=float(run.times[-1]), sup_norm=float(np.max(np.abs(u_T))),
                 holder_norm=math.nan, bound=math.nan, slack=math.nan,
                 residual=err_odd, wall_ms=wall)
    report = RunReport(rows=[row], manifest=_manifest(
        {"nu": nu, "horizon": horizon, "points": points, "m": m}, dom))
    return SteadyStateResult(err_odd, err_even, res0, drift_rate, report)


@dataclass
class SelectionDiagnostics:
    sample_times: np.ndarray
    tail_diameters: np.ndarray   # (times, tails): diameter of the runs k..end
    symmetry_defect: float       # worst even/odd defect across runs
    pairs: list[tuple[float, float]]   # the (m, nu) path

    @property
    def full_diameters(self) -> np.ndarray:
        """Per-time diameter across the whole (m, nu) family."""
        return self.tail_diameters[:, 0]


def peano_selection(gamma_tilde: float, m_list, base_cfg: SolveConfig,
                    f, g: GridField, nu_for_m, parity: str = "even",
                    n_sample_times: int = 4) -> SelectionDiagnostics:
    """Tail diameters of {u^{m,nu}(t, .)} along a vanishing schedule.

    tail_diameters[i, k] is the sup-norm diameter at sample time i of the
    runs from the k-th schedule point on.  Sub-sequence convergence is all
    the estimates guarantee, so only diameters are reported, never a limit.
    """
    import dataclasses as _dc
    runs = []
    pairs = []
    for m in sorted(float(v) for v in m_list):
        nu = float(nu_for_m(m))
        drift = DriftSpec.peano(gamma_tilde)
        cfg = _dc.replace(base_cfg, drift=drift, m=m, nu=nu)
        runs.append(_solve_any(cfg, f, g))
        pairs.append((m, nu))
    sample_times = np.linspace(0.0, base_cfg.horizon, n_sample_times + 1)[1:]
    n_tails = max(1, len(runs) - 1)
    diameters = np.zeros((sample_times.size, n_tails))
    for i, t in enumerate(sample_times):
        frames = [r.sample(float(t)) for r in runs]
        for k in range(n_tails):
            diam = 0.0
            for a in range(k, len(frames)):
                for b in range(a + 1, len(frames)):
                    diam = max(diam, float(np.max(np.abs(frames[a] - frames[b]))))
            diameters[i, k] = diam
    defect = 0.0
    for r in runs:
        flipped = np.roll(r.values[-1][::-1], 1)
        sign = 1.0 if parity == "even" else -1.0
        defect = max(defect, float(np.max(np.abs(r.values[-1] - sign * flipped))))
    return SelectionDiagnostics(sample_times, diameters, defect, pairs)


def time_derivative_besov(run: SpaceTimeField, gamma: float) -> list[tuple[float, float]]:
    """Thermic Besov norm of the discrete time derivative at exponent -1+gamma.

    Centered differences between stored frames; needs at least 3 frames.
    """
    if run.n_frames < 3:
        raise ResolutionError("frame stride too coarse for time differences")
    v_grid = default_v_grid(run.domain)
    out = []
    for j in range(1, run.n_frames - 1):
        dt2 = run.times[j + 1] - run.times[j - 1]
        dudt = GridField(run.domain, (run.values[j + 1] - run.values[j - 1]) / dt2)
        est = besov_norm_thermic(dudt, -1.0 + gamma, v_grid)
        out.append((float(run.times[j]), est.value))
    return out


def condinu_nu_for(m: float, consts: ScheduleConstants, cap: float = 1e-2,
                   floor: float = 1e-12) -> float:
    """Viscosity from the transport admissibility formula, kept in a sane
    floating range for the solver."""
    nu = condinu_transport(m, consts)
    if math.isinf(nu):
        nu = cap
    return float(min(max(nu, floor), cap))
