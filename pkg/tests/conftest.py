import numpy as np
import pytest

from vvlab.grid import Domain1D, GridField


@pytest.fixture
def dom():
    return Domain1D(4.0, 512)


@pytest.fixture
def dom_fine():
    return Domain1D(4.0, 1024)


def random_band_limited(domain: Domain1D, seed: int, max_mode: int = 12,
                        scale: float = 1.0) -> GridField:
    """Smooth random field from a few low Fourier modes (deterministic)."""
    rng = np.random.default_rng(seed)
    x = domain.x
    vals = np.zeros_like(x)
    for j in range(1, max_mode + 1):
        k = np.pi * j / domain.half_length
        a, b = rng.normal(size=2) / j**2
        vals += a * np.sin(k * x) + b * np.cos(k * x)
    return GridField(domain, scale * vals)
