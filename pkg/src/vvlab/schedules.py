"""Vanishing-viscosity compatibility conditions and the Gronwall-Henry envelope.

"Much smaller than" is made operational as

    lhs <= eps_ll * dominating quantity,

with eps_ll a tunable domination ratio (default 0.1) that is reported with
every run.  Generic constants default to C = 1 and are treated as one
calibrated value per data family, never per point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ScheduleConstants",
    "condinu_transport",
    "condinu_transport_log",
    "condinu_holder_timederiv",
    "uniqueness_window_transport",
    "burgers_schedules",
    "mittag_leffler_half",
    "gronwall_henry_envelope",
]


@dataclass
class ScheduleConstants:
    """Norm inputs and knobs shared by the schedule evaluators.

    f_holder   = ||f||_{L^inf(C^gamma)},  g_seminorm = [g]_gamma,
    f_sup/g_sup = the plain sup norms,    b_norm = ||b|| in its declared space,
    grad2_gm   = ||grad^2 g_m||_inf,      f_lip/g_lip = ||d/dx f||, ||d/dx g||.
    """

    gamma: float = 0.5
    beta: float = 0.5
    horizon: float = 1.0
    f_holder: float = 1.0
    g_seminorm: float = 1.0
    f_sup: float = 1.0
    g_sup: float = 1.0
    b_norm: float = 1.0
    grad2_gm: float = 1.0
    f_lip: float = 1.0
    g_lip: float = 1.0
    fm_c1: float = 1.0          # ||f_m||_{L^inf(C^1)}
    gm_c1: float = 1.0          # ||g_m||_{C^1}
    C: float = 1.0
    eps_ll: float = 0.1

    def __post_init__(self):
        if self.C <= 0:
            raise ValueError("C must be > 0")
        if not 0 < self.eps_ll <= 1:
            raise ValueError("eps_ll must be in (0, 1]")


def condinu_transport_log(m: float, k: ScheduleConstants) -> float:
    """log of the admissible-viscosity formula (stable for large m).

    The value itself can underflow float64 (it decays like
    exp(-c m^(1+beta))); the log form keeps the monotonicity in m exact.
    Returns +inf for degenerate norm inputs (a vanishing factor raised to a
    negative power), flagging an unconstrained viscosity.
    """
    if m <= 1:
        raise ValueError(f"m must be > 1, got {m}")
    g, b = k.gamma, k.beta
    if not 0 < g < 1:
        raise ValueError(f"gamma must be in (0, 1), got {g}")
    T = k.horizon

    base1 = (m ** (2.0 + b - g) * T ** ((1.0 - g) * (2.0 + g) / (2.0 * g) + 2.0)
             * k.f_holder * k.b_norm)
    if base1 <= 0:
        first = math.inf
    else:
        first = (-4.0 / (1.0 - g * g) * math.log(base1)
                 - 4.0 * k.C * m ** (1.0 + b) * k.b_norm * T / (1.0 - g * g))

    base2 = (k.C * m ** (2.0 + b) * k.b_norm * T ** ((2.0 - g * g + g) / (2.0 * g))
             * (m ** (1.0 - g) * (T * k.f_holder + k.g_seminorm))
             * (1.0 + k.f_holder))
    if base2 <= 0:
        second = math.inf
    else:
        second = (-4.0 / (g * (1.0 - g)) * math.log(base2)
                  - 8.0 * m ** (1.0 + b) * T * k.b_norm / (g * (1.0 - g)))

    return math.log(k.eps_ll) + min(first, second)


def condinu_transport(m: float, k: ScheduleConstants) -> float:
    """Largest admissible viscosity for the transport calibration at scale m.

    eps_ll times the minimum of the two admissibility formulas: power-law
    prefactors times exponentials in m^(1+beta).  +inf flags degenerate
    norm inputs; the value underflows to 0.0 for large m (use
    condinu_transport_log for the stable form).
    """
    log_nu = condinu_transport_log(m, k)
    if math.isinf(log_nu):
        return math.inf
    try:
        return math.exp(log_nu)
    except OverflowError:
        return math.inf


def condinu_holder_timederiv(m: float, nu: float, gamma: float,
                             gamma_tilde: float, grad2_gm: float,
                             eps_ll: float = 0.1) -> bool:
    """nu ||grad^2 g_m|| + nu^(gamma/2) m^(1 - gamma_tilde)  <=  eps_ll."""
    return nu * grad2_gm + nu ** (gamma / 2.0) * m ** (1.0 - gamma_tilde) <= eps_ll


@dataclass
class UniquenessWindow:
    nu_lo: float
    nu_hi: float
    empty: bool
    below_threshold: bool      # gamma_tilde <= 1/(1+gamma)

    def contains(self, nu: float) -> bool:
        return (not self.empty) and self.nu_lo <= nu <= self.nu_hi

    def pick(self, frac: float = 0.5) -> float:
        """Geometric interpolation between the window edges."""
        if self.empty:
            raise ValueError("empty uniqueness window")
        return self.nu_lo ** (1.0 - frac) * self.nu_hi ** frac


def uniqueness_window_transport(m: float, gamma: float, gamma_tilde: float,
                                grad2_gm: float = 1.0,
                                eps_ll: float = 0.1) -> UniquenessWindow:
    """Viscosity interval for a unique selection limit at scale m.

    Constraints (drift gamma_tilde-Holder, gamma_tilde > 1/(1+gamma) needed
    for a nonempty window as m grows):

        nu^((gamma-1)/2) <= eps_ll^-1 * m^(-1+2*gamma_tilde)     (lower edge)
        m^(1-gamma_tilde) * nu^(gamma/2) <= eps_ll               (upper edge)
        nu * ||grad^2 g_m|| <= eps_ll                            (upper edge)
    """
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must be in (0, 1), got {gamma}")
    below = gamma_tilde <= 1.0 / (1.0 + gamma)
    nu_lo = (m ** (-1.0 + 2.0 * gamma_tilde) / eps_ll) ** (2.0 / (gamma - 1.0))
    nu_hi = (eps_ll * m ** (gamma_tilde - 1.0)) ** (2.0 / gamma)
    if grad2_gm > 0:
        nu_hi = min(nu_hi, eps_ll / grad2_gm)
    return UniquenessWindow(nu_lo=nu_lo, nu_hi=nu_hi,
                            empty=(nu_lo > nu_hi) or below,
                            below_threshold=below)


def burgers_schedules(kind: str, m: float, nu: float,
                      k: ScheduleConstants) -> bool:
    """Evaluate the Burgers uniqueness conditions against eps_ll.

    turbulent: double exponential in m times ((1+m^(1-gamma)) nu^(gamma/2)
               + nu ||grad^2 g_m||) -- viscosity must vanish exponentially
               faster than the mollification grows.
    viscous:   exponential in 1/nu times m^(-gamma) -- the mollification
               must grow exponentially faster than the viscosity vanishes.
    Overflowing exponentials evaluate to +inf, i.e. the condition fails.
    """
    g, T = k.gamma, k.horizon
    try:
        if kind == "turbulent":
            inner = math.exp(min(k.C * m * T * (T * k.f_sup + k.g_sup), 700.0))
            outer = math.exp(min(k.C * T * (T * k.fm_c1 + k.gm_c1) * inner, 700.0))
            lhs = outer * ((1.0 + m ** (1.0 - g)) * nu ** (g / 2.0)
                           + nu * k.grad2_gm)
        elif kind == "viscous":
            inner = math.exp(min(k.C * T / nu * (T * k.f_sup + k.g_sup) ** 2, 700.0))
            outer = math.exp(min(k.C * T * (T * k.f_lip + k.g_lip) * inner, 700.0))
            lhs = outer * m ** (-g)
        else:
            raise ValueError(f"kind must be 'turbulent' or 'viscous', got {kind!r}")
    except OverflowError:
        return False
    return lhs <= k.eps_ll


def mittag_leffler_half(t: float, n_terms: int = 200) -> float:
    """Partial sum of E_{1/2}(t) = sum_n t^(n/2) / Gamma(n/2 + 1)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    total = 0.0
    root = math.sqrt(t)
    for n in range(n_terms + 1):
        total += root ** n / math.gamma(n / 2.0 + 1.0)
    return total


def gronwall_henry_envelope(t: float, K: float) -> float:
    """Bound phi(t) <= alpha(t) * E_{1/2}(theta t) <= alpha(t) * 2 exp(theta t)
    for phi(t) <= alpha(t) + K int_0^t (t-s)^(-1/2) phi(s) ds, alpha
    nondecreasing; theta = (K Gamma(1/2))^2 = pi K^2.  Returns the
    2*exp(theta*t) envelope factor."""
    if K < 0 or t < 0:
        raise ValueError("need K >= 0 and t >= 0")
    theta = math.pi * K * K
    return 2.0 * math.exp(theta * t)
