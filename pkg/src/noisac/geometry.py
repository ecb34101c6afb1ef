"""Node geometry: link distances, arrival angles, and path-loss amplitudes.

Both planar arrays in this system lie in the y-o-z plane, so only the y and z
direction cosines of a link ever enter a phase term.  The angle convention
used throughout is elevation = asin(d_z) and azimuth = asin(d_y / cos(el))
for a unit direction d, which makes the two direction-cosine phase factors
pi*cos(el)*sin(az) and pi*sin(el).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError


@dataclass(frozen=True)
class LinkGeometry:
    """One endpoint's view of a link: range plus arrival (or departure) angles.

    direction_phase_u and direction_phase_v are the per-index phase increments
    pi*cos(elevation)*sin(azimuth) and pi*sin(elevation) of a half-wavelength
    array lying in the y-o-z plane.
    """

    distance: float
    elevation: float
    azimuth: float
    direction_phase_u: float
    direction_phase_v: float

    def __post_init__(self):
        if not (self.distance > 0.0):
            raise ValueError(f"link distance must be positive, got {self.distance}")


@dataclass(frozen=True)
class PathLossModel:
    """Log-distance path loss, calibrated at a 1 m reference."""

    reference_loss_db: float = 30.0
    exponent_b2i: float = 2.3
    exponent_i2u: float = 2.2

    def __post_init__(self):
        if self.reference_loss_db < 0.0:
            raise ValueError("reference loss must be non-negative dB")
        if self.exponent_b2i <= 0.0 or self.exponent_i2u <= 0.0:
            raise ValueError("path-loss exponents must be positive")


def _as_point(p) -> np.ndarray:
    q = np.asarray(p, dtype=float)
    if q.shape != (3,):
        raise ValueError(f"position must have 3 components, got shape {q.shape}")
    if not np.all(np.isfinite(q)):
        raise ValueError(f"position components must be finite, got {q}")
    return q


def link_angles(origin, target) -> LinkGeometry:
    """Angles and range of the ray from ``origin`` towards ``target``.

    Elevation is measured from the horizontal (x-y) plane, azimuth within the
    array plane, so both URAs see the same convention.  A ray exactly along z
    has undefined azimuth; it is reported as 0.
    """
    a = _as_point(origin)
    b = _as_point(target)
    delta = b - a
    distance = float(np.linalg.norm(delta))
    if distance == 0.0:
        raise DegenerateGeometryError(f"coincident positions {tuple(a)}")
    d = delta / distance
    elevation = math.asin(max(-1.0, min(1.0, d[2])))
    cos_el = math.cos(elevation)
    if cos_el > 0.0:
        azimuth = math.asin(max(-1.0, min(1.0, d[1] / cos_el)))
    else:
        azimuth = 0.0
    return LinkGeometry(
        distance=distance,
        elevation=elevation,
        azimuth=azimuth,
        direction_phase_u=math.pi * cos_el * math.sin(azimuth),
        direction_phase_v=math.pi * math.sin(elevation),
    )


def link_from_angles(elevation: float, azimuth: float, distance: float) -> LinkGeometry:
    """LinkGeometry from explicit angles, with consistent direction phases."""
    return LinkGeometry(
        distance=distance,
        elevation=elevation,
        azimuth=azimuth,
        direction_phase_u=math.pi * math.cos(elevation) * math.sin(azimuth),
        direction_phase_v=math.pi * math.sin(elevation),
    )


def path_gain(distance: float, exponent: float, model: PathLossModel) -> float:
    """Amplitude gain of one link at range ``distance`` meters.

    The model is calibrated at 1 m and not valid below it.
    """
    if distance < 1.0:
        raise ValueError(f"distance {distance} m below the 1 m reference")
    loss_db = model.reference_loss_db + 10.0 * exponent * math.log10(distance)
    return 10.0 ** (-loss_db / 20.0)


def noise_power_for_snr(snr_db: float, gain_b2i: float, gain_i2u: float) -> float:
    """Noise variance that realizes the requested received SNR.

    The received SNR is defined as |gain_b2i * gain_i2u|^2 / sigma_z^2, so
    this simply solves for sigma_z^2.
    """
    if gain_b2i <= 0.0 or gain_i2u <= 0.0:
        raise ValueError("link gains must be positive")
    return (gain_b2i * gain_i2u) ** 2 / 10.0 ** (snr_db / 10.0)


def received_snr_db(gain_b2i: float, gain_i2u: float, noise_var: float) -> float:
    """Inverse of :func:`noise_power_for_snr`, used by round-trip checks."""
    return 10.0 * math.log10((gain_b2i * gain_i2u) ** 2 / noise_var)
