"""Channel construction, phase control, derivatives, and the receive mean."""

import cmath
import math

import numpy as np
import pytest

from noisac.arrays import UraShape, index_grids
from noisac.channel import (
    PhaseConfig,
    SignalModel,
    build_channels,
    derivative_channels,
    draw_symbols,
    mean_vector,
    phase_matrix,
    phase_vector,
)
from noisac.geometry import link_from_angles
from noisac.oracle import fd_channel_derivatives


def make_channels(gamma=0.4, phi=-0.3, *, user=UraShape(4, 4), irs=UraShape(4, 4),
                  gain_i2u=2.5e-3 + 0j, gain_b2i=6.3e-4 + 0j,
                  b2i_gamma=0.16, b2i_phi=0.1, bs_dep=-0.16, n_bs=8):
    return build_channels(
        link_from_angles(gamma, phi, 10.0),
        link_from_angles(b2i_gamma, b2i_phi, 30.0),
        gain_i2u=gain_i2u,
        gain_b2i=gain_b2i,
        user_shape=user,
        irs_shape=irs,
        n_bs=n_bs,
        bs_departure_elevation=bs_dep,
    )


def test_phase_matrix_identity():
    cfg = PhaseConfig(indices=np.zeros(4, dtype=int), bits=2)
    np.testing.assert_allclose(phase_matrix(cfg), np.eye(4), atol=1e-15)


def test_phase_matrix_one_bit():
    cfg = PhaseConfig(indices=np.array([0, 1]), bits=1)
    np.testing.assert_allclose(phase_matrix(cfg), np.diag([1.0, -1.0]), atol=1e-12)


def test_phase_matrix_two_bit_quadrants():
    cfg = PhaseConfig(indices=np.array([0, 1, 2, 3]), bits=2)
    np.testing.assert_allclose(phase_matrix(cfg), np.diag([1, 1j, -1, -1j]), atol=1e-12)


def test_phase_config_rejects_out_of_range():
    with pytest.raises(ValueError):
        PhaseConfig(indices=np.array([0, 4]), bits=2)
    with pytest.raises(ValueError):
        PhaseConfig(indices=np.array([-1]), bits=2)


def test_build_single_element_is_scalar_gain():
    cs = make_channels(user=UraShape(1, 1), irs=UraShape(1, 1), gain_i2u=0.5 + 0.1j)
    assert cs.h_i2u.shape == (1, 1)
    assert cs.h_i2u[0, 0] == pytest.approx(0.5 + 0.1j, abs=1e-15)


def test_entry_magnitudes_equal_gain():
    cs = make_channels()
    np.testing.assert_allclose(np.abs(cs.h_i2u), abs(cs.gain_i2u), atol=1e-12)
    np.testing.assert_allclose(np.abs(cs.h_b2i), abs(cs.gain_b2i), atol=1e-12)


def test_compact_entry_form_cross_check():
    # outer-product construction against the per-entry phase law
    rng = np.random.default_rng(11)
    for _ in range(100):
        gamma = rng.uniform(-1.4, 1.4)
        phi = rng.uniform(-1.5, 1.5)
        gain = complex(rng.normal(), rng.normal())
        if abs(gain) < 1e-3:
            continue
        cs = make_channels(gamma, phi, gain_i2u=gain)
        u = math.pi * math.cos(gamma) * math.sin(phi)
        v = math.pi * math.sin(gamma)
        m_y, m_z = index_grids(cs.user_shape)
        l_y, l_z = index_grids(cs.irs_shape)
        want = gain * np.exp(1j * ((m_y[:, None] - l_y[None, :]) * u
                                   + (m_z[:, None] - l_z[None, :]) * v))
        assert np.max(np.abs(cs.h_i2u - want)) < 1e-12 * abs(gain)


def test_rank_one_channels():
    cs = make_channels(0.52, -0.61)
    for h in (cs.h_i2u, cs.h_b2i):
        s = np.linalg.svd(h, compute_uv=False)
        assert s[1] / s[0] < 1e-10


def test_gain_phase_rotation_scales_entries():
    cs = make_channels()
    rot = cmath.exp(1j * 0.9)
    cs_rot = make_channels(gain_i2u=cs.gain_i2u * rot)
    np.testing.assert_allclose(cs_rot.h_i2u, cs.h_i2u * rot, atol=1e-15)
    np.testing.assert_allclose(np.abs(cs_rot.h_i2u), np.abs(cs.h_i2u), atol=1e-15)


def test_derivative_zero_cases():
    cs = make_channels(gamma=math.pi / 2, phi=0.8)
    d = derivative_channels(cs)
    np.testing.assert_allclose(d.d_phi, 0.0, atol=1e-12)

    tiny = make_channels(user=UraShape(1, 1), irs=UraShape(1, 1))
    d_tiny = derivative_channels(tiny)
    np.testing.assert_allclose(d_tiny.d_gamma, 0.0, atol=1e-15)
    np.testing.assert_allclose(d_tiny.d_phi, 0.0, atol=1e-15)


def test_derivatives_match_finite_differences():
    rng = np.random.default_rng(12)
    worst = 0.0
    for _ in range(100):
        cs = make_channels(rng.uniform(-1.3, 1.3), rng.uniform(-1.4, 1.4))
        analytic = derivative_channels(cs)
        reference = fd_channel_derivatives(cs, step=1e-6)
        for got, want in ((analytic.d_gamma, reference.d_gamma),
                          (analytic.d_phi, reference.d_phi)):
            denom = max(np.linalg.norm(want), 1e-30)
            worst = max(worst, np.linalg.norm(got - want) / denom)
    assert worst < 1e-6


def test_mean_vector_zero_symbol():
    cs = make_channels()
    xi = phase_vector(PhaseConfig(indices=np.zeros(16, dtype=int), bits=2))
    w = np.ones(8) / math.sqrt(8)
    np.testing.assert_allclose(mean_vector(cs, xi, w, 0.0), np.zeros(16), atol=1e-30)


def test_mean_vector_unit_scalar_case():
    cs = make_channels(user=UraShape(1, 1), irs=UraShape(1, 1),
                       gain_i2u=1.0 + 0j, gain_b2i=1.0 + 0j, n_bs=1)
    out = mean_vector(cs, np.ones(1), np.ones(1), 1.0)
    assert out.shape == (1,)
    assert out[0] == pytest.approx(1.0 + 0.0j, abs=1e-15)


def test_mean_vector_accepts_matrix_or_vector_reflection():
    cs = make_channels()
    cfg = PhaseConfig(indices=np.arange(16) % 4, bits=2)
    w = np.ones(8) / math.sqrt(8)
    a = mean_vector(cs, phase_matrix(cfg), w, 0.3 + 0.2j)
    b = mean_vector(cs, phase_vector(cfg), w, 0.3 + 0.2j)
    np.testing.assert_allclose(a, b, atol=1e-18)


def test_mean_vector_rejects_bad_shapes():
    cs = make_channels()
    with pytest.raises(ValueError):
        mean_vector(cs, np.ones(16), np.ones(5), 1.0)
    with pytest.raises(ValueError):
        mean_vector(cs, np.ones(7), np.ones(8), 1.0)


def test_signal_model_energy_constraint():
    SignalModel(mean_x=0.0, var_x=1.0, slots=2, noise_var=1e-12)
    with pytest.raises(ValueError):
        SignalModel(mean_x=0.5, var_x=1.0, slots=2, noise_var=1e-12)
    with pytest.raises(ValueError):
        SignalModel(mean_x=0.0, var_x=1.0, slots=2, noise_var=0.0)


def test_draw_symbols_statistics():
    model = SignalModel(mean_x=math.sqrt(0.5), var_x=0.5, slots=4000, noise_var=1.0)
    x = draw_symbols(model, np.random.default_rng(9))
    assert np.mean(np.abs(x) ** 2) == pytest.approx(1.0, abs=0.05)
    assert np.mean(x).real == pytest.approx(math.sqrt(0.5), abs=0.05)
