"""Drift families, mollified drifts, and backward characteristic flows.

The flow anchored at (tau, xi) is

    theta_{s,tau}(xi) = xi + int_s^tau b_m(r, theta_{r,tau}(xi)) dr,

i.e. theta solves d/ds theta = -b_m(s, theta) with theta = xi at s = tau.
For a constant drift c this gives xi + c*(tau - s); for a linear drift b*x
it gives xi * exp(b*(tau - s)).

Flows are integrated in continuous space with classical RK4; tabulated
drifts are evaluated through a periodic cubic spline so the flow error is
independent of the PDE grid spacing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .fields import smooth_window_values
from .grid import Domain1D, GridField, SpaceTimeField, spectral_derivative
from .mollify import MollifierKernel, mollify

__all__ = [
    "DriftSpec",
    "MollifiedDrift",
    "FlowTrajectory",
    "integrate_flow",
    "backward_characteristic",
    "flow_lipschitz_check",
    "peano_exact",
    "peano_residual",
]


@dataclass(frozen=True)
class DriftSpec:
    """A drift family with a declared regularity exponent.

    `declared_exponent` is the spatial Holder exponent gamma_tilde for
    bounded families; equivalently the Besov exponent is -beta with
    beta = -gamma_tilde.  Closed forms may carry a smooth window
    (inner, outer) confining them to the center of the torus.
    """

    form: str                    # constant | linear | peano | tabulated
    declared_exponent: float
    c: float = 0.0               # constant value
    slope: float = 0.0           # linear slope
    gamma_tilde: float = 0.5     # peano exponent
    radius: float = 1.0          # peano clamp
    window: tuple[float, float] | None = None
    table: SpaceTimeField | None = field(default=None, compare=False)

    # -- constructors -------------------------------------------------
    @staticmethod
    def constant(c: float) -> "DriftSpec":
        return DriftSpec(form="constant", declared_exponent=1.0, c=c)

    @staticmethod
    def linear(slope: float, window: tuple[float, float] | None = None) -> "DriftSpec":
        return DriftSpec(form="linear", declared_exponent=1.0, slope=slope,
                         window=window)

    @staticmethod
    def peano(gamma_tilde: float, radius: float = 1.0,
              window: tuple[float, float] = (2.0, 3.0)) -> "DriftSpec":
        """sign(x) * (|x| ^ radius-clamp)^gamma_tilde, smoothly windowed."""
        if not 0 < gamma_tilde <= 1:
            raise ValueError(f"gamma_tilde must be in (0,1], got {gamma_tilde}")
        return DriftSpec(form="peano", declared_exponent=gamma_tilde,
                         gamma_tilde=gamma_tilde, radius=radius, window=window)

    @staticmethod
    def tabulated(table: SpaceTimeField, declared_exponent: float) -> "DriftSpec":
        return DriftSpec(form="tabulated", declared_exponent=declared_exponent,
                         table=table)

    @property
    def beta(self) -> float:
        """Besov roughness: the drift lies in B^(-beta) with this beta."""
        return -self.declared_exponent

    # -- evaluation ----------------------------------------------------
    def evaluate(self, t: float, x) -> np.ndarray:
        """Closed-form values; tabulated drifts interpolate their frames."""
        x = np.asarray(x, dtype=float)
        if self.form == "constant":
            raw = np.full_like(x, self.c)
        elif self.form == "linear":
            raw = self.slope * x
        elif self.form == "peano":
            raw = np.sign(x) * np.minimum(np.abs(x), self.radius) ** self.gamma_tilde
        elif self.form == "tabulated":
            dom = self.table.domain
            vals = self.table.sample(t)
            xs = np.concatenate([dom.x, [dom.half_length]])
            ys = np.concatenate([vals, [vals[0]]])
            raw = CubicSpline(xs, ys, bc_type="periodic")(dom.wrap(x))
        else:
            raise ValueError(f"unknown drift form {self.form!r}")
        if self.window is not None and self.form != "tabulated":
            raw = raw * smooth_window_values(x, *self.window)
        return raw

    def on_grid(self, domain: Domain1D, t: float = 0.0) -> GridField:
        return GridField(domain, self.evaluate(t, domain.x))

    def is_time_dependent(self) -> bool:
        return self.form == "tabulated" and self.table.n_frames > 1

    def mollified(self, domain: Domain1D, m: float,
                  family: str = "gaussian") -> "MollifiedDrift":
        return MollifiedDrift(self, domain, m, family)


class MollifiedDrift:
    """A smooth drift b_m, evaluable on the grid and in continuous space.

    Constant and unwindowed linear forms keep their closed expression
    (Gaussian mollification is exact on affine functions); everything else
    is mollified on the grid and interpolated with a periodic cubic spline.
    """

    def __init__(self, spec: DriftSpec, domain: Domain1D, m: float,
                 family: str = "gaussian"):
        if m <= 1:
            raise ValueError(f"mollification scale must be > 1, got {m}")
        self.spec = spec
        self.domain = domain
        self.m = float(m)
        self.family = family
        self._exact = spec.form == "constant" or (
            spec.form == "linear" and spec.window is None)
        kernel = MollifierKernel(family, self.m)
        if spec.is_time_dependent():
            self._times = spec.table.times.copy()
        else:
            self._times = np.array([0.0])
        self._frames = []
        self._grad_frames = []
        for t in self._times:
            bm = mollify(spec.on_grid(domain, float(t)), kernel)
            self._frames.append(bm.values)
            self._grad_frames.append(spectral_derivative(bm, 1).values)
        self._splines = [self._make_spline(v) for v in self._frames]
        self.sup_norm = self._sup(self._frames)
        self.lip_norm = self._lip()

    def _make_spline(self, vals):
        dom = self.domain
        xs = np.concatenate([dom.x, [dom.half_length]])
        ys = np.concatenate([vals, [vals[0]]])
        return CubicSpline(xs, ys, bc_type="periodic")

    def _sup(self, frames) -> float:
        if self._exact:
            if self.spec.form == "constant":
                return abs(self.spec.c)
            return abs(self.spec.slope) * self.domain.half_length
        return max(float(np.max(np.abs(v))) for v in frames)

    def _lip(self) -> float:
        """Lipschitz constant sup_t [b_m(t, .)]_1."""
        if self._exact:
            return 0.0 if self.spec.form == "constant" else abs(self.spec.slope)
        return max(float(np.max(np.abs(g))) for g in self._grad_frames)

    def _time_weights(self, t: float):
        ts = self._times
        if ts.size == 1 or t <= ts[0]:
            return 0, 0, 0.0
        if t >= ts[-1]:
            return ts.size - 1, ts.size - 1, 0.0
        j = int(np.searchsorted(ts, t))
        w = (t - ts[j - 1]) / (ts[j] - ts[j - 1])
        return j - 1, j, w

    def eval(self, t: float, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self._exact:
            if self.spec.form == "constant":
                return np.full_like(x, self.spec.c)
            return self.spec.slope * x
        i, j, w = self._time_weights(t)
        xw = self.domain.wrap(x)
        if i == j:
            return self._splines[i](xw)
        return (1.0 - w) * self._splines[i](xw) + w * self._splines[j](xw)

    def grid_values(self, t: float = 0.0) -> np.ndarray:
        if self._exact:
            return self.eval(t, self.domain.x)
        i, j, w = self._time_weights(t)
        if i == j:
            return self._frames[i]
        return (1.0 - w) * self._frames[i] + w * self._frames[j]


@dataclass
class FlowTrajectory:
    """Backward flow samples from the anchor (tau, xi) down to s_end."""

    xi: float
    tau: float
    s_samples: np.ndarray           # decreasing from tau
    positions: np.ndarray
    drift_values: np.ndarray        # b_m(s, theta_s) at the samples
    escaped: bool = False           # left [-L, L) at some sample

    def position_at(self, s: float) -> float:
        # samples are decreasing; interpolate on the reversed view
        return float(np.interp(s, self.s_samples[::-1], self.positions[::-1]))

    def drift_integral(self, s: float, t: float) -> float:
        """Trapezoid of the stored drift values over [s, t]."""
        if t < s:
            raise ValueError("need s <= t")
        lo, hi = self.s_samples[-1], self.s_samples[0]
        if s < lo - 1e-12 or t > hi + 1e-12:
            raise ValueError(f"[{s}, {t}] not covered by trajectory [{lo}, {hi}]")
        grid = self.s_samples[::-1]
        vals = self.drift_values[::-1]
        pts = grid[(grid > s) & (grid < t)]
        ss = np.concatenate([[s], pts, [t]])
        vv = np.interp(ss, grid, vals)
        return float(np.trapezoid(vv, ss))


def _rk4_path(vel, y0: float, s_start: float, s_stop: float, dt: float):
    """Fixed-step RK4 from s_start to s_stop (either direction).

    Returns (s, y) arrays in integration order, s_start first.
    """
    span = s_stop - s_start
    n = max(1, int(math.ceil(abs(span) / dt - 1e-12)))
    h = span / n
    s = np.empty(n + 1)
    y = np.empty(n + 1)
    s[0], y[0] = s_start, y0
    si, yi = float(s_start), float(y0)
    for i in range(1, n + 1):
        k1 = vel(si, yi)
        k2 = vel(si + h / 2, yi + h / 2 * k1)
        k3 = vel(si + h / 2, yi + h / 2 * k2)
        k4 = vel(si + h, yi + h * k3)
        yi = yi + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        si = s_start + i * h
        s[i], y[i] = si, yi
    return s, y


def _finish(b_m, xi, tau, s_samples, positions) -> FlowTrajectory:
    drift_vals = np.array([float(b_m.eval(float(ss), float(pp)))
                           for ss, pp in zip(s_samples, positions)])
    dom = getattr(b_m, "domain", None)
    escaped = bool(dom is not None and
                   np.any(np.abs(positions) > dom.half_length + 1e-9))
    return FlowTrajectory(xi=float(xi), tau=float(tau), s_samples=s_samples,
                          positions=positions, drift_values=drift_vals,
                          escaped=escaped)


def integrate_flow(b_m, xi: float, tau: float, dt: float | None = None,
                   s_end: float = 0.0) -> FlowTrajectory:
    """RK4 integration of d/ds theta = -b_m(s, theta) from theta(tau) = xi.

    The step is fixed (default 1e-3 * tau, snapped to divide the interval),
    so the error is O(dt^4) for smooth drifts.  Positions are genuine real
    numbers; leaving [-L, L) only raises the `escaped` flag.
    """
    if tau < s_end:
        raise ValueError("need s_end <= tau")
    if dt is None:
        dt = 1e-3 * max(tau - s_end, 1e-12)
    if dt <= 0:
        raise ValueError("dt must be positive")

    def vel(s, y):
        return -float(b_m.eval(s, y))

    s, y = _rk4_path(vel, xi, tau, s_end, dt)
    return _finish(b_m, xi, tau, s, y)


def backward_characteristic(b_m, xi: float, tau: float, dt: float | None = None,
                            s_min: float = 0.0,
                            s_max: float | None = None) -> FlowTrajectory:
    """True characteristic X of dX/ds = +b_m(s, X) with X(tau) = xi.

    Covers [s_min, s_max] (anchor inside); samples are stored in decreasing
    s order like the flow.  Drift values are b_m(s, X_s), so trapezoid
    integrals of the stored values give int b_m along the path.
    """
    if s_max is None:
        s_max = tau
    if not s_min <= tau <= s_max:
        raise ValueError("need s_min <= tau <= s_max")
    if dt is None:
        dt = 1e-3 * max(s_max - s_min, 1e-12)

    def vel(s, y):
        return float(b_m.eval(s, y))

    parts_s, parts_y = [], []
    if s_max > tau:
        s_up, y_up = _rk4_path(vel, xi, tau, s_max, dt)
        parts_s.append(s_up[::-1])
        parts_y.append(y_up[::-1])
    else:
        parts_s.append(np.array([tau]))
        parts_y.append(np.array([float(xi)]))
    if tau > s_min:
        s_dn, y_dn = _rk4_path(vel, xi, tau, s_min, dt)
        parts_s.append(s_dn[1:])
        parts_y.append(y_dn[1:])
    s_samples = np.concatenate(parts_s)
    positions = np.concatenate(parts_y)
    return _finish(b_m, xi, tau, s_samples, positions)


def flow_lipschitz_check(b_m, x: float, x_prime: float, tau: float,
                         dt: float | None = None) -> float:
    """sup_s |theta_s(x) - theta_s(x')| / (|x - x'| * exp(Lip(b_m) * tau)).

    The Gronwall bound makes the ratio <= 1 up to integration tolerance.
    """
    if x == x_prime:
        raise ValueError("need two distinct points")
    ta = integrate_flow(b_m, x, tau, dt)
    tb = integrate_flow(b_m, x_prime, tau, dt)
    sep = np.max(np.abs(ta.positions - tb.positions))
    return float(sep / (abs(x - x_prime) * math.exp(b_m.lip_norm * tau)))


def peano_exact(t_star: float, sign: int, alpha: float, horizon: float,
                n_samples: int = 201):
    """One branch of the non-unique solutions of dX/dt = sign(X)|X|^alpha.

    Returns (times, values) with X_t = sign * c_alpha * (t - t_star)^(1/(1-alpha))
    on [t_star, horizon] and 0 before; c_alpha = (1-alpha)^(1/(1-alpha)) is
    fixed by requiring the unclamped equation to hold exactly.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if not 0 <= t_star <= horizon:
        raise ValueError("need 0 <= t_star <= horizon")
    if sign not in (-1, 1):
        raise ValueError("sign must be -1 or +1")
    c = (1.0 - alpha) ** (1.0 / (1.0 - alpha))
    times = np.linspace(0.0, horizon, n_samples)
    ramp = np.clip(times - t_star, 0.0, None)
    values = sign * c * ramp ** (1.0 / (1.0 - alpha))
    return times, values


def peano_residual(times: np.ndarray, values: np.ndarray, alpha: float,
                   t_min: float | None = None) -> float:
    """Sup of |dX/dt - sign(X)|X|^alpha| by centered differences.

    Checked on [t_min, horizon] to stay away from the departure time where
    one-sided kinks pollute the finite difference.
    """
    dx = (values[2:] - values[:-2]) / (times[2:] - times[:-2])
    mid_t = times[1:-1]
    mid_x = values[1:-1]
    rhs = np.sign(mid_x) * np.abs(mid_x) ** alpha
    res = np.abs(dx - rhs)
    if t_min is not None:
        res = res[mid_t >= t_min]
    return float(np.max(res)) if res.size else 0.0
