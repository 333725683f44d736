import numpy as np
import pytest

from poisswell.grid import Grid


@pytest.fixture
def grid1d():
    return Grid((64,))


@pytest.fixture
def grid2d():
    return Grid((32, 32))


@pytest.fixture
def grid3d():
    return Grid((16, 16, 16))


def random_band_limited(grid, rng, components=None, kmax=4, amplitude=1.0, complex_=False):
    """Smooth random field: a few low Fourier modes with decaying weights."""
    shape = grid.shape if components is None else (components,) + grid.shape
    fh = np.zeros(shape, dtype=complex)
    idx = grid.mode_index()
    keep = np.ones(grid.shape, dtype=bool)
    for i in range(grid.dim):
        keep &= np.abs(idx[i]) <= kmax
    coeffs = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    fh[..., keep] = coeffs[..., keep]
    f = grid.ifft(fh)
    if not complex_:
        f = f.real
    scale = np.max(np.abs(f))
    if scale > 0:
        f = f * (amplitude / scale)
    return f


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
