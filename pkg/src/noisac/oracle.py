"""Slow reference implementations used to validate the analytic paths.

Everything here is written with explicit per-entry loops and local scalar
formulas on purpose: these functions must not share matrix-construction
code with the main modules, otherwise an error there would cancel out of
the comparison.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .arrays import UraShape
from .channel import ChannelSet, DerivativeChannels, PhaseConfig
from .config import Scenario
from .fim import FisherMatrix
from .geometry import link_from_angles


def _entry_i2u(gain: complex, gamma: float, phi: float, m: int, l: int, m_z: int, l_z: int) -> complex:
    """One IRS-to-user channel entry from 1-based element numbers."""
    u = math.pi * math.cos(gamma) * math.sin(phi)
    v = math.pi * math.sin(gamma)
    my = (m - 1) // m_z
    mz = m - my * m_z - 1
    ly = (l - 1) // l_z
    lz = l - ly * l_z - 1
    return gain * cmath.exp(1j * ((my - ly) * u + (mz - lz) * v))


def _channel_i2u(gain: complex, gamma: float, phi: float, m_total: int, l_total: int,
                 m_z: int, l_z: int) -> np.ndarray:
    h = np.empty((m_total, l_total), dtype=complex)
    for m in range(1, m_total + 1):
        for l in range(1, l_total + 1):
            h[m - 1, l - 1] = _entry_i2u(gain, gamma, phi, m, l, m_z, l_z)
    return h


def _channel_b2i(scen: Scenario) -> np.ndarray:
    """BS-to-IRS channel entry by entry: arrival URA phase times departure ULA phase."""
    l_total = scen.irs_shape.size
    l_z = scen.irs_shape.n_z
    u = math.pi * math.cos(scen.link_b2i.elevation) * math.sin(scen.link_b2i.azimuth)
    v = math.pi * math.sin(scen.link_b2i.elevation)
    h = np.empty((l_total, scen.n_t), dtype=complex)
    for l in range(1, l_total + 1):
        ly = (l - 1) // l_z
        lz = l - ly * l_z - 1
        arr = cmath.exp(1j * (ly * u + lz * v))
        for k in range(scen.n_t):
            dep = cmath.exp(-1j * k * math.pi * math.sin(scen.bs_departure_elevation))
            h[l - 1, k] = scen.gain_b2i * arr * dep
    return h


def _stacked_mean(scen: Scenario, phase: PhaseConfig, w: np.ndarray,
                  symbols: np.ndarray, gamma: float, phi: float) -> np.ndarray:
    """Stacked noiseless receive vector over all slots at the given angles."""
    m_total = scen.user_shape.size
    l_total = scen.irs_shape.size
    h_i2u = _channel_i2u(scen.gain_i2u, gamma, phi, m_total, l_total,
                         scen.user_shape.n_z, scen.irs_shape.n_z)
    h_b2i = _channel_b2i(scen)
    q = np.zeros(l_total, dtype=complex)
    for l in range(l_total):
        shift = cmath.exp(2j * math.pi * int(phase.indices[l]) / 2**phase.bits)
        acc = 0.0 + 0.0j
        for k in range(scen.n_t):
            acc += h_b2i[l, k] * w[k]
        q[l] = shift * acc
    per_slot = np.zeros(m_total, dtype=complex)
    for m in range(m_total):
        acc = 0.0 + 0.0j
        for l in range(l_total):
            acc += h_i2u[m, l] * q[l]
        per_slot[m] = acc
    out = np.zeros(m_total * len(symbols), dtype=complex)
    for t, x in enumerate(symbols):
        out[t * m_total:(t + 1) * m_total] = per_slot * x
    return out


def fd_fim(scen: Scenario, phase: PhaseConfig, w: np.ndarray, symbols,
           noise_var: float, step: float = 1e-6) -> FisherMatrix:
    """Information matrix from central differences of the stacked mean.

    Symbol parameters are perturbed directly as complex values (the mean is
    linear in them, so the centered difference is exact up to rounding);
    the two angle parameters rebuild the channel at the shifted angle.
    """
    if not 1e-8 <= step <= 1e-4:
        raise ValueError(f"step {step} outside the supported range [1e-8, 1e-4]")
    symbols = np.asarray(symbols, dtype=complex)
    t_slots = len(symbols)
    gamma = scen.link_i2u.elevation
    phi = scen.link_i2u.azimuth

    columns = []
    for i in range(t_slots):
        plus = symbols.copy()
        minus = symbols.copy()
        plus[i] += step
        minus[i] -= step
        diff = _stacked_mean(scen, phase, w, plus, gamma, phi) \
            - _stacked_mean(scen, phase, w, minus, gamma, phi)
        columns.append(diff / (2.0 * step))
    for which in ("gamma", "phi"):
        if which == "gamma":
            diff = _stacked_mean(scen, phase, w, symbols, gamma + step, phi) \
                - _stacked_mean(scen, phase, w, symbols, gamma - step, phi)
        else:
            diff = _stacked_mean(scen, phase, w, symbols, gamma, phi + step) \
                - _stacked_mean(scen, phase, w, symbols, gamma, phi - step)
        columns.append(diff / (2.0 * step))

    n = t_slots + 2
    j = np.zeros((n, n))
    for i in range(n):
        for k in range(n):
            acc = 0.0
            for a, b in zip(columns[i], columns[k]):
                acc += (a.conjugate() * b).real
            j[i, k] = 2.0 / noise_var * acc
    return FisherMatrix(entries=j)


def random_instance(
    rng: np.random.Generator,
    slots: int = 2,
    irs_shape: UraShape = UraShape(4, 4),
    user_shape: UraShape = UraShape(4, 4),
    n_t: int = 4,
    bits: int = 2,
) -> tuple[Scenario, PhaseConfig, np.ndarray, np.ndarray]:
    """Random but non-degenerate setup for oracle comparisons.

    Angles stay away from the poles, gains carry random phases, and the
    beamformer is a generic complex vector rather than the matched one, so
    agreement here is not an artifact of a special configuration.
    """

    def angle(span):
        return float(rng.uniform(-span, span))

    def gain():
        mag = float(rng.uniform(0.5, 2.0)) * 1e-3
        theta = float(rng.uniform(0.0, 2.0 * math.pi))
        return mag * cmath.exp(1j * theta)

    scen = Scenario(
        link_i2u=link_from_angles(angle(1.2), angle(1.4), 10.0),
        link_b2i=link_from_angles(angle(1.2), angle(1.4), 30.0),
        bs_departure_elevation=angle(1.2),
        gain_i2u=gain(),
        gain_b2i=gain(),
        noise_var=float(rng.uniform(0.5, 2.0)) * 1e-12,
        user_shape=user_shape,
        irs_shape=irs_shape,
        n_t=n_t,
        p_t=1.0,
    )
    phase = PhaseConfig(indices=rng.integers(0, 2**bits, irs_shape.size), bits=bits)
    w = rng.normal(0.0, 1.0, n_t) + 1j * rng.normal(0.0, 1.0, n_t)
    symbols = rng.normal(0.0, 1.0, slots) + 1j * rng.normal(0.0, 1.0, slots)
    return scen, phase, w, symbols


def fd_channel_derivatives(cs: ChannelSet, step: float = 1e-6) -> DerivativeChannels:
    """Entrywise central differences of the IRS-to-user channel in both angles."""
    if not 1e-8 <= step <= 1e-4:
        raise ValueError(f"step {step} outside the supported range [1e-8, 1e-4]")
    gamma = cs.link_i2u.elevation
    phi = cs.link_i2u.azimuth
    m_total = cs.user_shape.size
    l_total = cs.irs_shape.size
    d_gamma = np.empty((m_total, l_total), dtype=complex)
    d_phi = np.empty((m_total, l_total), dtype=complex)
    for m in range(1, m_total + 1):
        for l in range(1, l_total + 1):
            args = (cs.gain_i2u, m, l, cs.user_shape.n_z, cs.irs_shape.n_z)
            d_gamma[m - 1, l - 1] = (
                _entry_i2u(args[0], gamma + step, phi, m, l, args[3], args[4])
                - _entry_i2u(args[0], gamma - step, phi, m, l, args[3], args[4])
            ) / (2.0 * step)
            d_phi[m - 1, l - 1] = (
                _entry_i2u(args[0], gamma, phi + step, m, l, args[3], args[4])
                - _entry_i2u(args[0], gamma, phi - step, m, l, args[3], args[4])
            ) / (2.0 * step)
    return DerivativeChannels(d_gamma=d_gamma, d_phi=d_phi)
