"""Test-field corpus: windowed sample functions on the periodic domain.

Everything rough lives well inside [-L/2, L/2] so that torus wrap-around
stays below tolerance; the C-infinity window below enforces that.
"""

from __future__ import annotations

import numpy as np

from .grid import Domain1D, GridField

__all__ = [
    "smooth_window",
    "smooth_window_values",
    "constant_field",
    "gaussian_field",
    "sine_field",
    "sqrt_abs_field",
    "abs_field",
    "ramp_field",
    "sign_field",
    "boundary_sup",
]


def _smoothstep(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
    return a / (a + b)


def smooth_window_values(x, inner: float, outer: float):
    """Plateau 1 on |x| <= inner, 0 for |x| >= outer, C-infinity between."""
    if not 0 < inner < outer:
        raise ValueError("need 0 < inner < outer")
    return _smoothstep((outer - np.abs(x)) / (outer - inner))


def smooth_window(domain: Domain1D, inner: float | None = None,
                  outer: float | None = None) -> GridField:
    L = domain.half_length
    inner = L / 4 if inner is None else inner
    outer = L / 2 if outer is None else outer
    return GridField(domain, smooth_window_values(domain.x, inner, outer))


def constant_field(domain: Domain1D, c: float) -> GridField:
    return GridField(domain, np.full(domain.points, float(c)))


def gaussian_field(domain: Domain1D, variance: float, center: float = 0.0) -> GridField:
    """Heat-kernel profile h_v(x - center); effectively compact for v << L^2."""
    z = domain.x - center
    vals = np.exp(-z * z / (2.0 * variance)) / np.sqrt(2.0 * np.pi * variance)
    return GridField(domain, vals)


def sine_field(domain: Domain1D, mode: int, amplitude: float = 1.0) -> GridField:
    """sin(k x) with k = pi*mode/L, an exact Fourier mode of the torus."""
    k = np.pi * mode / domain.half_length
    return GridField(domain, amplitude * np.sin(k * domain.x))


def _windowed(domain, raw, inner, outer):
    inner = domain.half_length / 4 if inner is None else inner
    outer = domain.half_length / 2 if outer is None else outer
    return GridField(domain, raw * smooth_window_values(domain.x, inner, outer))


def sqrt_abs_field(domain: Domain1D, inner=None, outer=None) -> GridField:
    """Windowed sqrt(|x|); Holder exponent 1/2 with seminorm 1 at the kink."""
    return _windowed(domain, np.sqrt(np.abs(domain.x)), inner, outer)


def abs_field(domain: Domain1D, inner=None, outer=None) -> GridField:
    return _windowed(domain, np.abs(domain.x), inner, outer)


def ramp_field(domain: Domain1D, slope: float = 1.0, inner=None, outer=None) -> GridField:
    """Windowed odd ramp slope*x; equals the linear function on the plateau."""
    return _windowed(domain, slope * domain.x, inner, outer)


def sign_field(domain: Domain1D, scale: float = 0.5, inner=None, outer=None) -> GridField:
    """Windowed scale*sgn(x) (the Burgers steady-state source for scale=1/2)."""
    return _windowed(domain, scale * np.sign(domain.x), inner, outer)


def boundary_sup(f: GridField, margin: float | None = None) -> float:
    """Sup of |f| within `margin` of the torus seam; wrap-around indicator."""
    L = f.domain.half_length
    margin = L / 8 if margin is None else margin
    mask = np.abs(np.abs(f.domain.x) - L) <= margin
    return float(np.max(np.abs(f.values[mask]))) if mask.any() else 0.0
