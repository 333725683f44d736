"""
Periodic-torus discretization shared by every other module.

Conventions used throughout the package:

* spatial axes are the *last* ``d`` axes of any field array; component axes
  (spinor or vector) come first,
* scalar fields have shape ``grid.shape``, 3-vector fields ``(3, *shape)``,
  2-spinor fields ``(2, *shape)``,
* for ``d < 3`` all vector quantities still carry 3 components ("slab"
  symmetry); derivatives along inactive axes are identically zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Grid:
    """
    Uniform periodic grid on a d-dimensional torus.

    Parameters
    ----------
    shape : tuple of int
        Points per axis, one entry per dimension (powers of two recommended).
    lengths : tuple of float
        Axis lengths; defaults to 2*pi per axis.
    """

    shape: tuple
    lengths: tuple = None

    # derived, filled in __post_init__
    dim: int = field(init=False)
    spacings: tuple = field(init=False)

    def __post_init__(self):
        shape = tuple(int(n) for n in np.atleast_1d(self.shape))
        if not 1 <= len(shape) <= 3:
            raise ValueError("grid dimension must be 1, 2 or 3")
        if any(n < 4 or n % 2 for n in shape):
            raise ValueError("points per axis must be even and >= 4")
        lengths = self.lengths
        if lengths is None:
            lengths = (2.0 * np.pi,) * len(shape)
        lengths = tuple(float(L) for L in np.atleast_1d(lengths))
        if len(lengths) != len(shape):
            raise ValueError("lengths must match shape")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "dim", len(shape))
        object.__setattr__(
            self, "spacings", tuple(L / n for L, n in zip(lengths, shape))
        )

    # -- geometry -----------------------------------------------------------

    @property
    def axes(self):
        """FFT axes (the trailing spatial axes)."""
        return tuple(range(-self.dim, 0))

    @property
    def npoints(self):
        return int(np.prod(self.shape))

    @property
    def cell_volume(self):
        return float(np.prod(self.spacings))

    @property
    def volume(self):
        return float(np.prod(self.lengths))

    def coordinates(self):
        """Coordinate arrays ``x[i]`` broadcastable to ``shape``."""
        out = []
        for i, (n, L) in enumerate(zip(self.shape, self.lengths)):
            x = np.arange(n) * (L / n)
            shp = [1] * self.dim
            shp[i] = n
            out.append(x.reshape(shp))
        return out

    # -- spectral tables ----------------------------------------------------

    def wavenumbers(self):
        """
        Derivative wavenumber arrays ``k[i]`` broadcastable to ``shape``.

        The Nyquist mode is zeroed so the table is exactly antisymmetric
        under index negation and odd derivatives of real fields stay real.
        Always returns 3 entries; entries for inactive axes are zero.
        """
        ks = []
        for i in range(3):
            if i < self.dim:
                n, L = self.shape[i], self.lengths[i]
                k = 2.0 * np.pi * np.fft.fftfreq(n, d=L / n)
                k[n // 2] = 0.0
                shp = [1] * self.dim
                shp[i] = n
                ks.append(k.reshape(shp))
            else:
                ks.append(np.zeros((1,) * self.dim))
        return ks

    def k_squared(self):
        """|k|^2 on the grid (from the antisymmetrized table)."""
        ks = self.wavenumbers()
        return sum(k**2 for k in ks[: self.dim])

    def dealias_mask(self):
        """Boolean 2/3-rule mask: keeps |index_i| <= N_i // 3 per axis."""
        mask = np.ones(self.shape, dtype=bool)
        for i, n in enumerate(self.shape):
            idx = np.rint(np.fft.fftfreq(n) * n).astype(int)
            keep = np.abs(idx) <= n // 3
            shp = [1] * self.dim
            shp[i] = n
            mask &= keep.reshape(shp)
        return mask

    def mode_index(self):
        """Integer mode-index arrays per active axis (fftfreq * N)."""
        out = []
        for i, n in enumerate(self.shape):
            idx = np.rint(np.fft.fftfreq(n) * n).astype(int)
            shp = [1] * self.dim
            shp[i] = n
            out.append(idx.reshape(shp))
        return out

    # -- transforms ---------------------------------------------------------

    def fft(self, f):
        """Forward transform over the spatial axes."""
        return np.fft.fftn(f, axes=self.axes)

    def ifft(self, fh):
        """Inverse transform; returns the complex result."""
        return np.fft.ifftn(fh, axes=self.axes)

    def ifft_real(self, fh):
        """Inverse transform of a spectrally-Hermitian field; drops imag."""
        return np.fft.ifftn(fh, axes=self.axes).real


def k3(grid: Grid):
    """Cached 3-entry wavenumber table (zeros on inactive axes)."""
    tab = getattr(grid, "_k3", None)
    if tab is None:
        tab = grid.wavenumbers()
        object.__setattr__(grid, "_k3", tab)
    return tab


def k2(grid: Grid):
    tab = getattr(grid, "_k2", None)
    if tab is None:
        tab = grid.k_squared()
        object.__setattr__(grid, "_k2", tab)
    return tab


def k2_safe(grid: Grid):
    """
    |k|^2 with zero entries replaced by 1 (for spectral division).

    Besides the k = 0 mode this also covers Nyquist lines, where the
    antisymmetrized derivative table vanishes; callers must zero those
    modes in their result (see :func:`inverse_laplacian_modes`).
    """
    tab = getattr(grid, "_k2_safe", None)
    if tab is None:
        tab = k2(grid).copy()
        tab[tab == 0.0] = 1.0
        object.__setattr__(grid, "_k2_safe", tab)
    return tab


def inverse_laplacian_modes(grid: Grid):
    """Boolean mask of modes invertible by -Delta (k2 != 0)."""
    tab = getattr(grid, "_invertible", None)
    if tab is None:
        tab = k2(grid) != 0.0
        object.__setattr__(grid, "_invertible", tab)
    return tab


def dealias_mask(grid: Grid):
    tab = getattr(grid, "_mask", None)
    if tab is None:
        tab = grid.dealias_mask()
        object.__setattr__(grid, "_mask", tab)
    return tab
