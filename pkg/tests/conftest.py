"""Shared, session-scoped simulation fixtures.

The scattering runs are the expensive part of the suite; each configuration
is simulated once here and reused by the module tests and the acceptance
tests.
"""

import numpy as np
import pytest

from fluxon_readout import ccmodel, lattice, mqc, quantum1d
from fluxon_readout.params import CASE_A, CASE_B

V_IN = 0.6
LATTICE_T_END = 65.0
CC_T_END = 80.0


def run_lattice(params, n, t_end=LATTICE_T_END, v=V_IN):
    state = lattice.init_state(params, v, qubit_init=n)
    traj = lattice.run(state, params, t_end=t_end, v_in=v)
    return traj, lattice.classify_outcome(traj, params)


def run_cc(params, n, t_end=CC_T_END, v=V_IN):
    state = ccmodel.initial_cc_state(params, v, qubit_init=n)
    traj = ccmodel.run_cc(state, params, t_end=t_end)
    return traj, traj.outcome


def run_backaction(params, traj, n):
    """Driven-qubit propagation using the interface drive of a lattice run."""
    drive = quantum1d.DriveTrace(times=traj.times,
                                 phi_b=traj.phi_b - traj.phi_b[0])
    grid = quantum1d.PhaseGrid()
    sol = quantum1d.eigensolve(quantum1d.build_hamiltonian(grid, params),
                               n + 1)
    psi0 = quantum1d.WaveFunction(grid, sol.states[:, n].astype(complex))
    return quantum1d.propagate_driven(psi0, drive, params, initial_state=n,
                                      dt=2e-3)


@pytest.fixture(scope="session")
def lat_a0():
    return run_lattice(CASE_A, 0)


@pytest.fixture(scope="session")
def lat_a1():
    return run_lattice(CASE_A, 1)


@pytest.fixture(scope="session")
def lat_b0():
    return run_lattice(CASE_B, 0)


@pytest.fixture(scope="session")
def lat_b1():
    return run_lattice(CASE_B, 1)


@pytest.fixture(scope="session")
def cc_a0():
    return run_cc(CASE_A, 0)


@pytest.fixture(scope="session")
def cc_a1():
    return run_cc(CASE_A, 1)


@pytest.fixture(scope="session")
def cc_b0():
    return run_cc(CASE_B, 0)


@pytest.fixture(scope="session")
def cc_b1():
    return run_cc(CASE_B, 1)


@pytest.fixture(scope="session")
def mqc_a0():
    state = mqc.initial_mqc_state(CASE_A, V_IN, n=0)
    return mqc.run_mqc(state, CASE_A, t_end=CC_T_END, initial_state=0)


@pytest.fixture(scope="session")
def mqc_a1():
    state = mqc.initial_mqc_state(CASE_A, V_IN, n=1)
    return mqc.run_mqc(state, CASE_A, t_end=CC_T_END, initial_state=1)


@pytest.fixture(scope="session")
def back_a0(lat_a0):
    return run_backaction(CASE_A, lat_a0[0], 0)


@pytest.fixture(scope="session")
def back_a1(lat_a1):
    return run_backaction(CASE_A, lat_a1[0], 1)


@pytest.fixture(scope="session")
def back_b0(lat_b0):
    return run_backaction(CASE_B, lat_b0[0], 0)


@pytest.fixture(scope="session")
def back_b1(lat_b1):
    return run_backaction(CASE_B, lat_b1[0], 1)
