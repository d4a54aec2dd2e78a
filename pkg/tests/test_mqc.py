"""Mixed quantum-classical propagation of the collective-coordinate model."""

import math

import numpy as np
import pytest

from fluxon_readout import ccmodel, mqc
from fluxon_readout.errors import ValidationError
from fluxon_readout.params import CASE_A


def test_initial_state_validation():
    with pytest.raises(ValidationError):
        mqc.initial_mqc_state(CASE_A, 0.6, x0=-2.0)
    state = mqc.initial_mqc_state(CASE_A, 0.6)
    assert state.psi.norm() == pytest.approx(1.0, abs=1e-9)
    assert state.xl == -10.0 and state.xr == 0.0


def test_decoupled_limit_matches_classical():
    """With the qubit effectively decoupled, the classical coordinates follow
    the pure collective-coordinate trajectory and the wave function stays in
    its initial eigenstate."""
    params = CASE_A.replace(lq=1e9)
    state = mqc.initial_mqc_state(params, 0.6, n=0)
    rep = mqc.run_mqc(state, params, t_end=12.0, dt=2e-3)
    assert rep.final_infidelity < 1e-10

    q0 = rep.phi_q_mean[0]
    cc_state = ccmodel.initial_cc_state(params, 0.6, qubit_init=float(q0))
    cc_traj = ccmodel.run_cc(cc_state, params, t_end=12.0, dt=2e-3,
                             sample_stride=25)
    m = min(len(rep.times), len(cc_traj.times))
    assert np.allclose(rep.times[:m], cc_traj.times[:m], atol=1e-9)
    assert np.allclose(rep.xl[:m], cc_traj.xl[:m], atol=1e-8)
    assert np.allclose(rep.xr[:m], cc_traj.xr[:m], atol=1e-8)


def test_energy_and_norm_conservation(mqc_a1):
    e = mqc_a1.energy
    assert np.max(np.abs(e - e[0])) / abs(e[0]) < 1e-4
    weights = mqc_a1.cm_abs2.sum(axis=1)
    assert np.all(weights < 1.0 + 1e-6)


def test_outcome_channels_match_classical(mqc_a0, mqc_a1, cc_a0, cc_a1):
    assert mqc_a0.outcome.channel == cc_a0[1].channel
    assert mqc_a1.outcome.channel == cc_a1[1].channel


def test_qubit_mean_tracks_classical(mqc_a0, cc_a0):
    traj, _ = cc_a0
    tmax = min(mqc_a0.times[-1], traj.times[-1])
    sel = mqc_a0.times <= tmax
    interp = np.interp(mqc_a0.times[sel], traj.times, traj.phi_q)
    assert np.max(np.abs(mqc_a0.phi_q_mean[sel] - interp)) < 0.1 * math.pi


def test_adiabatic_variant_short_run():
    state = mqc.initial_mqc_state(CASE_A, 0.6, n=0)
    rep = mqc.run_adiabatic(state, CASE_A, t_end=6.0, dt=2e-3)
    # during the quiet approach the adiabatic state stays the initial one
    assert not rep.overlap_flagged
    assert rep.cm_abs2[-1, 0] == pytest.approx(1.0, abs=1e-6)


def test_report_csv(tmp_path, mqc_a1):
    path = tmp_path / "mqc.csv"
    mqc.report_to_csv(mqc_a1, str(path))
    data = np.genfromtxt(path, delimiter=",", names=True)
    assert len(data) == len(mqc_a1.times)
    assert "c0_abs2" in data.dtype.names
