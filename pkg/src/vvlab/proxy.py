"""Frozen-coefficient proxy operators and the Duhamel residual diagnostic.

Freezing the mollified drift along the characteristic through (tau, xi)
turns the advection-diffusion operator into one with a time-dependent but
space-constant first-order coefficient

    c(s) = b_m(s, X_s),    dX/ds = b_m(s, X_s),  X_tau = xi,

whose kernel is a Gaussian recentred by the running drift integral:

    p_hat(s, t, x, y) = (4*pi*nu*(t-s))^(-1/2)
                        * exp(-(x - int_s^t c - y)^2 / (4*nu*(t-s))).

With this kernel p_hat satisfies d/dt p_hat = nu*Lap p_hat - c(t)*grad p_hat,
the semigroup/Green operators invert (d/dt + c(s) d/dx - nu Lap), and the
solution of the mollified equation obeys the exact identity

    u = P_hat g_m + G_hat f_m + G_hat(b_Delta . grad u),
    b_Delta(s, y) = b_m(s, X_s) - b_m(s, y),

for every freezing point, which is what duhamel_residual measures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .flows import FlowTrajectory, MollifiedDrift, backward_characteristic
from .grid import (GridField, SpaceTimeField, heat_convolve,
                   spectral_derivative, translate_field)

__all__ = [
    "FreezingPoint",
    "RegimeExponents",
    "regime_exponents",
    "cut_locus_time",
    "perturbed_kernel",
    "kernel_pde_residual",
    "proxy_semigroup",
    "proxy_green",
    "duhamel_residual",
]


@dataclass(frozen=True)
class FreezingPoint:
    tau: float
    xi: float


@dataclass(frozen=True)
class RegimeExponents:
    alpha1: float
    alpha2: float
    mode: str


def regime_exponents(mode: str, gamma: float) -> RegimeExponents:
    """Diagonal/off-diagonal calibration exponents.

    Transport calibration: (alpha1, alpha2) = ((1+gamma)/4, (2+gamma)/(2*gamma)).
    Parabolic calibration: the parabolic scale alpha1 = alpha2 = 1/2.
    """
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must be in (0, 1), got {gamma}")
    if mode == "transport":
        return RegimeExponents((1.0 + gamma) / 4.0, (2.0 + gamma) / (2.0 * gamma),
                               "transport")
    if mode == "parabolic":
        return RegimeExponents(0.5, 0.5, "parabolic")
    raise ValueError(f"mode must be 'transport' or 'parabolic', got {mode!r}")


def cut_locus_time(t: float, x: float, x_prime: float, nu: float,
                   exps: RegimeExponents) -> tuple[float, bool]:
    """t0 = t - nu^(-a1/a2) |x - x'|^(1/a2) and the everywhere-off-diagonal flag.

    For s <= t the equivalence   s <= t0  <=>  |x - x'| <= nu^a1 (t - s)^a2
    holds; t0 <= 0 means the off-diagonal regime is in force on all of [0, t].
    """
    if nu <= 0:
        raise ValueError(f"nu must be > 0, got {nu}")
    r = abs(x - x_prime)
    t0 = t - nu ** (-exps.alpha1 / exps.alpha2) * r ** (1.0 / exps.alpha2)
    return t0, t0 <= 0.0


class FrozenPath:
    """Characteristic through a freezing point with its running drift integral.

    Covers [0, t_max] even when the freezing time is interior, so kernels
    p_hat(s, t, ., .) are available for every 0 <= s < t <= t_max.
    """

    def __init__(self, b_m: MollifiedDrift, fp: FreezingPoint,
                 t_max: float | None = None, dt: float | None = None):
        self.fp = fp
        t_max = fp.tau if t_max is None else max(t_max, fp.tau)
        self.trajectory = backward_characteristic(b_m, fp.xi, fp.tau, dt,
                                                  s_min=0.0, s_max=t_max)
        self._s = self.trajectory.s_samples[::-1]
        self._c = self.trajectory.drift_values[::-1]
        # cumulative trapezoid of c over the sample grid
        self._cum = np.concatenate(
            [[0.0], np.cumsum(0.5 * (self._c[1:] + self._c[:-1]) * np.diff(self._s))])

    def shift(self, s: float, t: float) -> float:
        """int_s^t b_m(r, X_r) dr along the frozen characteristic."""
        return float(np.interp(t, self._s, self._cum) - np.interp(s, self._s, self._cum))

    def drift_at(self, s: float) -> float:
        return float(np.interp(s, self._s, self._c))


def perturbed_kernel(s: float, t: float, x, y, traj: FlowTrajectory,
                     nu: float) -> np.ndarray:
    """Pointwise perturbed heat kernel value(s).

    `traj` must be the frozen characteristic through the freezing point
    (see backward_characteristic) covering [s, t].
    """
    if s >= t:
        raise ValueError("need s < t")
    if nu <= 0:
        raise ValueError(f"nu must be > 0, got {nu}")
    shift = traj.drift_integral(s, t)
    var = 2.0 * nu * (t - s)
    z = np.asarray(x, dtype=float) - shift - np.asarray(y, dtype=float)
    return np.exp(-z * z / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)


def kernel_pde_residual(path: FrozenPath, nu: float, s: float, t: float,
                        x: float, y: float, h_t: float = 1e-5,
                        h_x: float = 1e-4) -> float:
    """|d/dt p - nu Lap p + c(t) grad p| by centered finite differences."""
    traj = path.trajectory

    def p(tt, xx):
        return float(perturbed_kernel(s, tt, xx, y, traj, nu))

    dp_dt = (p(t + h_t, x) - p(t - h_t, x)) / (2 * h_t)
    dp_dx = (p(t, x + h_x) - p(t, x - h_x)) / (2 * h_x)
    lap = (p(t, x + h_x) - 2 * p(t, x) + p(t, x - h_x)) / h_x**2
    c_t = path.drift_at(t)
    return abs(dp_dt - nu * lap + c_t * dp_dx)


def proxy_semigroup(g: GridField, t: float, path: FrozenPath, nu: float) -> GridField:
    """P_hat g(t, .): heat convolution at variance 2*nu*t, shifted by the
    frozen drift integral (spectral phase, exact on the torus)."""
    if nu <= 0:
        raise ValueError(f"nu must be > 0, got {nu}")
    return translate_field(heat_convolve(g, 2.0 * nu * t), path.shift(0.0, t))


def proxy_green(f: SpaceTimeField, t: float, path: FrozenPath, nu: float) -> GridField:
    """G_hat f(t, .): trapezoid over the frame times of the shifted heat
    convolutions of f(s, .)."""
    if nu <= 0:
        raise ValueError(f"nu must be > 0, got {nu}")
    times = f.times[f.times <= t + 1e-12]
    if times.size < 2:
        raise ValueError("Green operator needs at least two frames below t")
    vals = np.zeros((times.size, f.domain.points))
    for j, s in enumerate(times):
        frame = GridField(f.domain, f.sample(float(s)))
        conv = heat_convolve(frame, 2.0 * nu * (t - float(s)))
        vals[j] = translate_field(conv, path.shift(float(s), t)).values
    return GridField(f.domain, np.trapezoid(vals, times, axis=0))


def _resample(source, times, domain) -> SpaceTimeField:
    """Sample a static or time-dependent field onto the given frame times."""
    vals = np.zeros((len(times), domain.points))
    for j, t in enumerate(times):
        vals[j] = source.values if isinstance(source, GridField) else source.sample(float(t))
    return SpaceTimeField(domain, np.asarray(times, dtype=float), vals)


@dataclass
class DuhamelReport:
    residual_sup: float
    t: float
    freezing_point: FreezingPoint
    per_x: np.ndarray


def duhamel_residual(u: SpaceTimeField, b_m: MollifiedDrift,
                     f_m, g_m: GridField, nu: float,
                     fp: FreezingPoint | None = None,
                     flow_dt: float | None = None) -> DuhamelReport:
    """Sup over x of |u(t,.) - P_hat g_m - G_hat f_m - G_hat(b_Delta grad u)|.

    `u` must be a solver output for the same mollified inputs; `f_m` may be
    None, a GridField or a SpaceTimeField.  The identity holds for every
    freezing point, so the residual measures pure discretization error and
    shrinks under grid/time refinement.
    """
    t = float(u.times[-1])
    if fp is None:
        fp = FreezingPoint(tau=t, xi=0.0)
    path = FrozenPath(b_m, fp, t_max=t, dt=flow_dt)
    dom = u.domain

    total = proxy_semigroup(g_m, t, path, nu)
    if f_m is not None:
        total = total + proxy_green(_resample(f_m, u.times, dom), t, path, nu)

    # b_Delta(s, y) * grad u(s, y) on the solver frames
    w = np.zeros_like(u.values)
    for j, s in enumerate(u.times):
        grad = spectral_derivative(u.frame(j), 1).values
        b_delta = path.drift_at(float(s)) - b_m.grid_values(float(s))
        w[j] = b_delta * grad
    total = total + proxy_green(SpaceTimeField(dom, u.times, w), t, path, nu)

    per_x = u.values[-1] - total.values
    return DuhamelReport(residual_sup=float(np.max(np.abs(per_x))), t=t,
                         freezing_point=fp, per_x=per_x)
