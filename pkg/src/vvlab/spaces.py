"""Holder seminorms and thermic Besov norms for sampled fields.

The Besov norm of exponent ``alpha`` is estimated through the heat
semigroup: the homogeneous part is

    sup_v  v**(m - alpha/2) * ||(d/dv)^m (h_v * f)||_inf

over a geometric grid of variances v in ((2*dx)^2, 1], with m the smallest
integer making the exponent coercive (m = 1 for alpha < 2, m = 2 for
alpha in [2, 4)).  The low-frequency part of the inhomogeneous norm is
taken as ||h_1 * f||_inf, a smooth-cutoff surrogate that is exact for
constants.  All values are lower bounds of their continuum counterparts
and converge under refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError
from .grid import GridField, heat_convolve, thermic_derivative

__all__ = [
    "NormEstimate",
    "holder_seminorm",
    "holder_norm_b",
    "default_v_grid",
    "besov_norm_thermic",
    "duality_gap",
]


@dataclass(frozen=True)
class NormEstimate:
    """A norm value with its kind, window and resolution provenance."""

    value: float
    kind: str                     # "holder" | "besov" | "sup"
    exponent: float
    window: tuple[float, float]
    resolution: tuple[int, int]   # (grid points, v-grid size or pair-scan radius)
    homogeneous: float = 0.0      # besov only: value without the low-frequency term
    low_frequency: float = 0.0    # besov only

    def __post_init__(self):
        if self.value < -1e-15:
            raise ValueError("norm value must be nonnegative")


def _window_or_default(f: GridField, window):
    L = f.domain.half_length
    return (-L, L - f.domain.dx) if window is None else (float(window[0]), float(window[1]))


def holder_seminorm(f: GridField, gamma: float, window=None,
                    max_pair_distance: float | None = None) -> NormEstimate:
    """Max of |f(x)-f(y)| / |x-y|^gamma over grid pairs in the window.

    Distances use the torus metric, so the scan is translation invariant;
    for windows shorter than L this coincides with the line distance.
    """
    if not 0 < gamma <= 1:
        raise ValueError(f"gamma must be in (0, 1], got {gamma}")
    dom = f.domain
    lo, hi = _window_or_default(f, window)
    idx = dom.index_range(lo, hi)
    if idx.size < 2:
        raise ValueError("window must contain at least 2 grid points")
    if max_pair_distance is None:
        max_pair_distance = dom.half_length / 2
    if max_pair_distance < dom.dx:
        raise ValueError("max_pair_distance must be at least one grid spacing")

    full = idx.size == dom.points
    vals = f.values if full else f.values[idx]
    n = vals.size
    w = min(int(math.floor(max_pair_distance / dom.dx + 1e-9)),
            dom.points // 2 if full else n - 1)
    best = 0.0
    half_circ = dom.half_length * 2.0
    for s in range(1, w + 1):
        if full:
            diffs = np.abs(np.roll(vals, -s) - vals)  # wrap pairs allowed
        else:
            diffs = np.abs(vals[s:] - vals[:-s])
        d = s * dom.dx
        d = min(d, half_circ - d) if full else d
        cand = float(np.max(diffs)) / d**gamma
        if cand > best:
            best = cand
    return NormEstimate(best, "holder", gamma, (lo, hi), (dom.points, w))


def holder_norm_b(f: GridField, gamma: float, window=None,
                  max_pair_distance: float | None = None) -> NormEstimate:
    """Holder seminorm plus the sup norm over the same window."""
    semi = holder_seminorm(f, gamma, window, max_pair_distance)
    lo, hi = semi.window
    idx = f.domain.index_range(lo, hi)
    sup = float(np.max(np.abs(f.values[idx])))
    return NormEstimate(semi.value + sup, "holder", gamma, semi.window, semi.resolution)


def default_v_grid(domain, n: int = 48) -> np.ndarray:
    """Geometric variance grid from (2*dx)^2 to 1.

    Below (2*dx)^2 the discrete heat multiplier under-resolves the kernel.
    """
    v_min = (2.0 * domain.dx) ** 2
    if v_min >= 1.0:
        raise ValueError("grid too coarse for any admissible variance")
    return np.geomspace(v_min, 1.0, n)


def _thermic_order(alpha: float) -> int:
    if alpha < 2.0:
        return 1
    if alpha < 4.0:
        return 2
    raise ValueError(f"exponent {alpha} not coercive for thermic order <= 2")


def _space_norm(values: np.ndarray, dx: float, p: str) -> float:
    if p == "inf":
        return float(np.max(np.abs(values)))
    return float(np.sum(np.abs(values)) * dx)  # grid L1


def _besov_parts(f: GridField, alpha: float, v_grid, p: str):
    m = _thermic_order(alpha)
    homog = 0.0
    for v in v_grid:
        g = thermic_derivative(f, float(v), m)
        homog = max(homog, float(v) ** (m - alpha / 2.0) * _space_norm(g.values, f.domain.dx, p))
    low = _space_norm(heat_convolve(f, 1.0).values, f.domain.dx, p)
    return homog, low


def besov_norm_thermic(f: GridField, alpha: float,
                       v_grid: np.ndarray | None = None) -> NormEstimate:
    """Inhomogeneous thermic Besov norm of exponent alpha (sup-in-v form)."""
    dom = f.domain
    if v_grid is None:
        v_grid = default_v_grid(dom)
    v_grid = np.asarray(v_grid, dtype=float)
    if v_grid.size == 0:
        raise ValueError("v_grid must be nonempty")
    if np.any(np.diff(v_grid) <= 0):
        raise ValueError("v_grid must be ascending")
    v_min = (2.0 * dom.dx) ** 2
    if v_grid[0] < v_min - 1e-15 or v_grid[-1] > 1.0 + 1e-12:
        raise ValueError(f"v_grid must lie in [(2*dx)^2, 1] = [{v_min:.3g}, 1]")
    homog, low = _besov_parts(f, alpha, v_grid, "inf")
    L = dom.half_length
    return NormEstimate(low + homog, "besov", alpha, (-L, L - dom.dx),
                        (dom.points, v_grid.size), homogeneous=homog,
                        low_frequency=low)


def duality_gap(phi: GridField, psi: GridField, alpha: float,
                v_grid: np.ndarray | None = None) -> float:
    """Ratio |integral(phi*psi)| / (B^alpha_inf,inf norm * B^-alpha_1,1 proxy).

    The L1 proxy reuses the thermic formula with the grid L1 norm in space.
    Diagnostic only; no certified duality constant is claimed.
    """
    if phi.domain != psi.domain:
        raise ValueError("fields live on different domains")
    if v_grid is None:
        v_grid = default_v_grid(phi.domain)
    pairing = abs(float(np.sum(phi.values * psi.values) * phi.domain.dx))
    n_phi = besov_norm_thermic(phi, alpha, v_grid).value
    h1, l1 = _besov_parts(psi, -alpha, v_grid, "l1")
    n_psi = h1 + l1
    denom = n_phi * n_psi
    if denom == 0.0:
        if pairing == 0.0:
            return 0.0
        raise DegenerateInputError("zero norm with nonzero pairing")
    return pairing / denom
