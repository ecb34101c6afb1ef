"""Rank-1 cascade channels, IRS phase control, and the noiseless receive mean.

The BS-to-IRS and IRS-to-user channels are single-path outer products of
array responses scaled by a complex gain.  Because the IRS and user arrays
are parallel planes, the IRS-side departure direction of the IRS-to-user
link is tied to the user-side arrival direction (mirror through the plane),
which collapses the product to one phase profile driven by the arrival
direction cosines:

    [h_i2u]_{m,l} = gain * exp(j[(m_y - l_y) u + (m_z - l_z) v])

with u = pi cos(el) sin(az) and v = pi sin(el) of the arrival side.  The
angle derivatives used by the information matrix are exact derivatives of
this entry form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arrays import UraShape, index_grids, ula_response, ura_response
from .geometry import LinkGeometry


@dataclass(frozen=True)
class PhaseConfig:
    """Discrete IRS phase shifts as indices into the 2^bits uniform grid."""

    indices: np.ndarray
    bits: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        object.__setattr__(self, "indices", idx)
        if self.bits < 1:
            raise ValueError("bit depth must be at least 1")
        if idx.ndim != 1 or idx.size < 1:
            raise ValueError("phase indices must be a non-empty 1-D sequence")
        if np.any(idx < 0) or np.any(idx >= 2**self.bits):
            raise ValueError(f"phase indices out of range [0, {2**self.bits})")

    @property
    def size(self) -> int:
        return int(self.indices.size)


def phase_vector(cfg: PhaseConfig) -> np.ndarray:
    """Unit-modulus reflection coefficients exp(j 2 pi k / 2^bits)."""
    return np.exp(2j * math.pi * cfg.indices / 2**cfg.bits)


def phase_matrix(cfg: PhaseConfig) -> np.ndarray:
    """Diagonal reflection matrix of the phase configuration."""
    return np.diag(phase_vector(cfg))


def _reflection(theta) -> np.ndarray:
    """Accept a PhaseConfig, a length-L coefficient vector, or an LxL diagonal."""
    if isinstance(theta, PhaseConfig):
        return phase_vector(theta)
    arr = np.asarray(theta)
    if arr.ndim == 2:
        return np.diagonal(arr)
    return arr


@dataclass(frozen=True)
class ChannelSet:
    """The two cascade channels plus the parameters that generated them."""

    h_b2i: np.ndarray
    h_i2u: np.ndarray
    gain_b2i: complex
    gain_i2u: complex
    link_i2u: LinkGeometry
    link_b2i: LinkGeometry
    user_shape: UraShape
    irs_shape: UraShape


@dataclass(frozen=True)
class DerivativeChannels:
    """Entrywise derivatives of the IRS-to-user channel w.r.t. its arrival angles."""

    d_gamma: np.ndarray
    d_phi: np.ndarray


@dataclass(frozen=True)
class SignalModel:
    """Per-slot transmit symbol statistics and receiver noise level."""

    mean_x: complex
    var_x: float
    slots: int
    noise_var: float

    def __post_init__(self):
        if self.var_x < 0.0:
            raise ValueError("symbol variance must be non-negative")
        if self.noise_var <= 0.0:
            raise ValueError("noise variance must be positive")
        if self.slots < 1:
            raise ValueError("slot count must be at least 1")
        energy = abs(self.mean_x) ** 2 + self.var_x
        if abs(energy - 1.0) > 1e-9:
            raise ValueError(f"symbol energy |mean|^2 + var must be 1, got {energy}")


def draw_symbols(model: SignalModel, rng: np.random.Generator) -> np.ndarray:
    """One block of complex Gaussian symbols with the model's mean and variance."""
    scale = math.sqrt(model.var_x / 2.0)
    noise = rng.standard_normal(model.slots) + 1j * rng.standard_normal(model.slots)
    return model.mean_x + scale * noise


def build_channels(
    link_i2u: LinkGeometry,
    link_b2i: LinkGeometry,
    *,
    gain_i2u: complex,
    gain_b2i: complex,
    user_shape: UraShape,
    irs_shape: UraShape,
    n_bs: int,
    bs_departure_elevation: float,
) -> ChannelSet:
    """Construct both rank-1 channel matrices.

    ``link_i2u`` is the arrival side at the user, ``link_b2i`` the arrival
    side at the IRS.  The IRS-side departure response of the i2u link is the
    conjugate of the arrival-angle response (parallel-plane tie), so the
    Hermitian outer product below evaluates both responses at the arrival
    angles and reproduces the compact entry form in the module docstring.
    """
    b_user = ura_response(link_i2u.elevation, link_i2u.azimuth, user_shape)
    b_irs_dep = ura_response(link_i2u.elevation, link_i2u.azimuth, irs_shape)
    h_i2u = gain_i2u * np.outer(b_user, b_irs_dep.conj())

    b_irs_arr = ura_response(link_b2i.elevation, link_b2i.azimuth, irs_shape)
    a_bs = ula_response(bs_departure_elevation, n_bs)
    h_b2i = gain_b2i * np.outer(b_irs_arr, a_bs.conj())

    return ChannelSet(
        h_b2i=h_b2i,
        h_i2u=h_i2u,
        gain_b2i=gain_b2i,
        gain_i2u=gain_i2u,
        link_i2u=link_i2u,
        link_b2i=link_b2i,
        user_shape=user_shape,
        irs_shape=irs_shape,
    )


def derivative_channels(cs: ChannelSet) -> DerivativeChannels:
    """Closed-form angle derivatives of the IRS-to-user channel.

    Each entry is j*pi*(real coefficient)*[h_i2u]_{m,l}, the coefficient
    coming from differentiating the direction-cosine phases u and v of the
    arrival angles.
    """
    gamma = cs.link_i2u.elevation
    phi = cs.link_i2u.azimuth
    m_y, m_z = index_grids(cs.user_shape)
    l_y, l_z = index_grids(cs.irs_shape)
    dy = m_y[:, None] - l_y[None, :]
    dz = m_z[:, None] - l_z[None, :]

    coeff_gamma = dz * math.cos(gamma) - dy * math.sin(gamma) * math.sin(phi)
    coeff_phi = dy * math.cos(gamma) * math.cos(phi)
    d_gamma = 1j * math.pi * coeff_gamma * cs.h_i2u
    d_phi = 1j * math.pi * coeff_phi * cs.h_i2u
    return DerivativeChannels(d_gamma=d_gamma, d_phi=d_phi)


def mean_vector(cs: ChannelSet, theta, w: np.ndarray, x_t: complex) -> np.ndarray:
    """Noiseless received vector h_i2u * Theta * h_b2i * w * x_t for one slot."""
    xi = _reflection(theta)
    w = np.asarray(w)
    if w.shape != (cs.h_b2i.shape[1],):
        raise ValueError(f"beamformer length {w.shape} does not match {cs.h_b2i.shape[1]} BS antennas")
    if xi.shape != (cs.h_b2i.shape[0],):
        raise ValueError(f"reflection vector length {xi.shape} does not match {cs.h_b2i.shape[0]} IRS elements")
    return cs.h_i2u @ (xi * (cs.h_b2i @ w)) * x_t
