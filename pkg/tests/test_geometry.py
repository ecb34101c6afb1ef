"""Link geometry, path loss, and SNR conversions."""

import math

import numpy as np
import pytest

from noisac.errors import DegenerateGeometryError
from noisac.geometry import (
    PathLossModel,
    link_angles,
    noise_power_for_snr,
    path_gain,
    received_snr_db,
)

MODEL = PathLossModel()


def test_vertical_ray_hits_elevation_boundary():
    g = link_angles((0, 0, 0), (0, 0, 5))
    assert g.elevation == pytest.approx(math.pi / 2)
    assert g.azimuth == 0.0
    assert g.distance == pytest.approx(5.0)


def test_broadside_ray():
    g = link_angles((0, 0, 0), (1, 0, 0))
    assert g.elevation == 0.0
    assert g.azimuth == 0.0
    assert g.distance == pytest.approx(1.0)


def test_diagonal_ray_angles():
    g = link_angles((0, 0, 0), (0, 1, 1))
    assert g.elevation == pytest.approx(math.pi / 4, abs=1e-12)
    assert g.azimuth == pytest.approx(math.pi / 2, abs=1e-7)
    assert g.distance == pytest.approx(math.sqrt(2.0), abs=1e-12)


def test_coincident_positions_rejected():
    with pytest.raises(DegenerateGeometryError):
        link_angles((1, 2, 3), (1, 2, 3))


def test_non_finite_position_rejected():
    with pytest.raises(ValueError):
        link_angles((0, 0, float("nan")), (1, 0, 0))


def test_distance_symmetry_and_direction_cosine_bound():
    rng = np.random.default_rng(5)
    for _ in range(200):
        a = rng.normal(0, 20, 3)
        b = rng.normal(0, 20, 3)
        if np.allclose(a, b):
            continue
        fwd = link_angles(a, b)
        back = link_angles(b, a)
        assert fwd.distance == pytest.approx(back.distance, rel=1e-12)
        norm = (fwd.direction_phase_u / math.pi) ** 2 + (fwd.direction_phase_v / math.pi) ** 2
        assert norm <= 1.0 + 1e-12


def test_direction_phases_consistent_with_angles():
    rng = np.random.default_rng(6)
    for _ in range(100):
        g = link_angles(rng.normal(0, 5, 3), rng.normal(0, 5, 3))
        assert g.direction_phase_u == pytest.approx(
            math.pi * math.cos(g.elevation) * math.sin(g.azimuth), abs=1e-12)
        assert g.direction_phase_v == pytest.approx(
            math.pi * math.sin(g.elevation), abs=1e-12)


def test_path_gain_at_reference():
    assert path_gain(1.0, 2.3, MODEL) == pytest.approx(10 ** (-1.5), rel=1e-12)


def test_path_gain_values():
    # independent evaluation of the log-distance formula
    expect_30 = 10 ** (-(30 + 10 * 2.3 * math.log10(30.0)) / 20)
    expect_10 = 10 ** (-(30 + 10 * 2.2 * math.log10(10.0)) / 20)
    assert path_gain(30.0, 2.3, MODEL) == pytest.approx(expect_30, rel=1e-12)
    assert path_gain(10.0, 2.2, MODEL) == pytest.approx(expect_10, rel=1e-12)
    assert expect_30 == pytest.approx(6.33e-4, rel=1e-3)
    assert expect_10 == pytest.approx(2.51e-3, rel=1e-3)


def test_path_gain_monotone_in_distance_and_exponent():
    d = np.linspace(1.0, 80.0, 40)
    gains = [path_gain(x, 2.3, MODEL) for x in d]
    assert all(b < a for a, b in zip(gains, gains[1:]))
    exps = np.linspace(1.5, 4.0, 20)
    gains_e = [path_gain(30.0, e, MODEL) for e in exps]
    assert all(b < a for a, b in zip(gains_e, gains_e[1:]))


def test_path_gain_below_reference_rejected():
    with pytest.raises(ValueError):
        path_gain(0.5, 2.3, MODEL)


def test_noise_power_identity_cases():
    assert noise_power_for_snr(0.0, 1.0, 1.0) == pytest.approx(1.0, rel=1e-15)
    assert noise_power_for_snr(10.0, 1.0, 1.0) == pytest.approx(0.1, rel=1e-15)


def test_noise_power_default_geometry():
    g_b2i = path_gain(30.0, 2.3, MODEL)
    g_i2u = path_gain(10.0, 2.2, MODEL)
    sigma = noise_power_for_snr(0.0, g_b2i, g_i2u)
    assert sigma == pytest.approx((g_b2i * g_i2u) ** 2, rel=1e-12)
    assert sigma == pytest.approx(2.53e-12, rel=1e-2)


def test_noise_power_round_trip():
    g_b2i = path_gain(30.0, 2.3, MODEL)
    g_i2u = path_gain(10.0, 2.2, MODEL)
    for snr in (-7.5, 0.0, 12.0):
        sigma = noise_power_for_snr(snr, g_b2i, g_i2u)
        assert received_snr_db(g_b2i, g_i2u, sigma) == pytest.approx(snr, abs=1e-12)


def test_noise_power_rejects_bad_gains():
    with pytest.raises(ValueError):
        noise_power_for_snr(0.0, -1.0, 1.0)
    with pytest.raises(ValueError):
        noise_power_for_snr(0.0, 1.0, 0.0)
