"""Soliton profiles, the mirror ansatz, coordinate fits and track analysis."""

import math

import numpy as np
import pytest

from fluxon_readout import soliton
from fluxon_readout.errors import ValidationError
from fluxon_readout.params import CASE_A


def test_profile_winding_and_center_value():
    x = np.linspace(-30.0, 30.0, 7)
    phi = soliton.soliton_profile(x, 1, 0.0, 1.0)
    assert phi[0] == pytest.approx(2.0 * math.pi, abs=1e-9)
    assert phi[-1] == pytest.approx(0.0, abs=1e-9)
    assert soliton.soliton_profile(0.0, 1, 0.0, 1.0) == pytest.approx(math.pi)


def test_slope_matches_finite_difference():
    x = np.linspace(-4.0, 4.0, 101)
    h = 1e-6
    for sigma in (1, -1):
        num = (soliton.soliton_profile(x + h, sigma, 0.3, 0.8)
               - soliton.soliton_profile(x - h, sigma, 0.3, 0.8)) / (2.0 * h)
        ana = soliton.soliton_slope(x, sigma, 0.3, 0.8)
        assert np.allclose(num, ana, atol=1e-6)


def test_interface_values_match_ansatz_field():
    for sigma in (1, -1):
        for xc in (-6.0, -1.0, 0.0, 2.0):
            left = soliton.ansatz_field(0.0, xc, 0.0, 0.8, "left", sigma)
            assert soliton.phi_left(xc, 0.8, sigma) == pytest.approx(
                float(left), abs=1e-9)
            right = soliton.ansatz_field(0.0, 0.0, xc, 0.8, "right", sigma)
            assert soliton.phi_right(xc, 0.8, sigma) == pytest.approx(
                float(right), abs=1e-9)


def test_interface_derivatives_match_finite_difference():
    h = 1e-6
    for sigma in (1, -1):
        for xc in (-3.0, 0.0, 1.5):
            num_l = (soliton.phi_left(xc + h, 0.8, sigma)
                     - soliton.phi_left(xc - h, 0.8, sigma)) / (2.0 * h)
            assert soliton.dphi_left(xc, 0.8, sigma) == pytest.approx(
                num_l, abs=1e-6)
            num_r = (soliton.phi_right(xc + h, 0.8, sigma)
                     - soliton.phi_right(xc - h, 0.8, sigma)) / (2.0 * h)
            assert soliton.dphi_right(xc, 0.8, sigma) == pytest.approx(
                num_r, abs=1e-6)


def test_incoming_limits():
    # fluxon far away on the left: interface quiet, phi_B = 0
    assert soliton.phi_left(-20.0, 0.8, 1) == pytest.approx(0.0, abs=1e-9)
    assert soliton.phi_right(0.0, 0.8, 1) == pytest.approx(0.0, abs=1e-9)
    # transmitted limit: right termination phase winds to 2 pi, so the
    # interface difference phi_L - phi_R winds by -2 pi
    assert soliton.phi_right(-20.0, 0.8, 1) == pytest.approx(
        2.0 * math.pi, abs=1e-9)


def test_fit_roundtrip_recovers_centers():
    params = CASE_A
    a = params.discreteness
    x_l = -(np.arange(params.n_cells) + 0.5) * a
    x_r = +(np.arange(params.n_cells) + 0.5) * a
    width = 0.8
    for xl_true, xr_true in ((-4.0, 0.0), (-1.2, -0.5), (0.0, -3.0)):
        pl = soliton.ansatz_field(x_l, xl_true, xr_true, width, "left")
        pr = soliton.ansatz_field(x_r, xl_true, xr_true, width, "right")
        fit = soliton.fit_cc(pl, pr, params, width)
        assert fit.xl == pytest.approx(xl_true, abs=0.05)
        assert fit.xr == pytest.approx(xr_true, abs=0.05)
        assert fit.residual < 0.05
        assert not fit.low_confidence


def test_channel_classification_from_synthetic_tracks():
    t = np.linspace(0.0, 40.0, 401)
    incoming = np.minimum(-10.0 + 0.6 * t, -0.5)
    # reflection: X_L comes in, goes back out
    xl = np.where(t < 18.0, -10.0 + 0.6 * t, -0.5 - 0.6 * (t - 18.0))
    xr = np.zeros_like(t)
    channel, idx, side = soliton.channel_from_tracks(xl, xr)
    assert channel == "ReflectedFluxon" and side == "left"
    # transmission: X_R leaves to -inf after arrival
    xr2 = np.where(t < 18.0, 0.0, -0.6 * (t - 18.0))
    channel, _, side = soliton.channel_from_tracks(incoming, xr2)
    assert channel == "TransmittedFluxon" and side == "right"
    # the incoming leg alone must not be classified
    channel, _, _ = soliton.channel_from_tracks(-10.0 + 0.1 * t,
                                                np.zeros_like(t))
    assert channel is None


def test_outgoing_velocity_and_retention():
    t = np.linspace(0.0, 10.0, 50)
    assert soliton.outgoing_velocity(t, -5.0 - 0.45 * t) == pytest.approx(0.45)
    assert soliton.energy_retention_from_velocities(0.6, 0.6) == pytest.approx(1.0)
    assert soliton.energy_retention_from_velocities(0.6, 0.0) == pytest.approx(0.8)
    with pytest.raises(ValidationError):
        soliton.outgoing_velocity(t[:2], t[:2])


def test_spec_validation():
    with pytest.raises(ValidationError):
        soliton.SolitonSpec(sigma=2, center=0.0, width=1.0, velocity=0.0)
    with pytest.raises(ValidationError):
        soliton.SolitonSpec(sigma=1, center=0.0, width=1.0, velocity=0.6)
    spec = soliton.SolitonSpec.moving(0.6)
    assert spec.width == pytest.approx(0.8)
