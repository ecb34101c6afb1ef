"""Index maps and array response (steering) vectors.

The user and IRS are half-wavelength uniform rectangular arrays in the
y-o-z plane; the BS is a half-wavelength uniform linear array along y.
Elements are numbered with the z index varying fastest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class UraShape:
    """Rectangular array dimensions (n_y columns of n_z elements each)."""

    n_y: int
    n_z: int
    spacing_wavelengths: float = 0.5

    def __post_init__(self):
        if self.n_y < 1 or self.n_z < 1:
            raise ValueError(f"array dimensions must be positive, got {self.n_y}x{self.n_z}")
        if self.spacing_wavelengths != 0.5:
            raise ValueError("only half-wavelength element spacing is supported")

    @property
    def size(self) -> int:
        return self.n_y * self.n_z


def index_split(m: int, n_z: int) -> tuple[int, int]:
    """Map a 1-based element number to its (y, z) grid indices, z fastest."""
    if m < 1:
        raise IndexError(f"element index {m} out of range (1-based)")
    i_y = (m - 1) // n_z
    i_z = m - i_y * n_z - 1
    return i_y, i_z


def index_grids(shape: UraShape) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized index maps for all elements of ``shape``, in element order."""
    m = np.arange(1, shape.size + 1)
    i_y = (m - 1) // shape.n_z
    i_z = m - i_y * shape.n_z - 1
    return i_y, i_z


def ura_response(elevation: float, azimuth: float, shape: UraShape) -> np.ndarray:
    """Unit-modulus response vector of a y-o-z plane URA.

    Entry m is exp(j*[i_y(m)*pi*cos(el)*sin(az) + i_z(m)*pi*sin(el)]); the
    first entry is always 1.
    """
    u = math.pi * math.cos(elevation) * math.sin(azimuth)
    v = math.pi * math.sin(elevation)
    i_y, i_z = index_grids(shape)
    return np.exp(1j * (i_y * u + i_z * v))


def ula_response(elevation: float, n: int) -> np.ndarray:
    """Response vector of an n-element ULA along y, entry k = exp(j(k-1)pi sin(el)).

    Any unit-modulus convention gives the same matched-beamformer gain, so
    the exact phase law here never reaches a reported metric.
    """
    if n < 1:
        raise ValueError(f"array size must be positive, got {n}")
    k = np.arange(n)
    return np.exp(1j * k * math.pi * math.sin(elevation))
