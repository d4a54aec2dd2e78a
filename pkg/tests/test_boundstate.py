"""Evanescent reduction, steady states and the two-mode eigenproblem."""

import math

import numpy as np
import pytest

from fluxon_readout import boundstate, quantum1d
from fluxon_readout.errors import ValidationError
from fluxon_readout.params import CASE_A


def test_evanescent_parameters_closed_form():
    ev = boundstate.evanescent_params(CASE_A)
    a = CASE_A.discreteness
    # decay constant solves the zero-frequency lattice dispersion relation
    assert math.cosh(ev.mu_a) == pytest.approx(1.0 + 0.5 * a * a, rel=1e-12)
    # effective junction: geometric series over the evanescent tail
    series = sum(math.exp(-2.0 * ev.mu_a * k) for k in range(1, 200))
    assert ev.ic_eff == pytest.approx(series, rel=1e-10)
    assert ev.cj_eff == pytest.approx(series, rel=1e-10)
    # effective inductance: coth(mu a / 2)
    assert ev.l_eff == pytest.approx(1.0 / math.tanh(0.5 * ev.mu_a), rel=1e-10)


def test_masses():
    m_lr, m_b, m_q = boundstate.masses(CASE_A)
    assert m_lr == pytest.approx(2.4, rel=0.05)
    assert m_b == pytest.approx(4.8, rel=0.05)
    assert m_q == pytest.approx(0.28, rel=0.05)


def test_steadystate_report():
    rep = boundstate.steadystate_report(CASE_A)
    assert rep.stable
    # small static displacements at phi_ext = 0.2 pi
    assert abs(rep.phi_b) < 0.1 * math.pi
    assert abs(rep.phi_lr) < 0.1 * math.pi
    assert (rep.omega_lr, rep.omega_b, rep.omega_q) == pytest.approx(
        (1.1, 0.78, 1.2), rel=0.05)
    sigmas = (math.sqrt(rep.var_phi_lr), math.sqrt(rep.var_phi_b),
              math.sqrt(rep.var_phi_q))
    assert sigmas == pytest.approx(
        (0.09 * math.pi, 0.07 * math.pi, 0.25 * math.pi), rel=0.10)


def test_grid_validation():
    with pytest.raises(ValidationError):
        boundstate.Grid2D(n_q=32)
    with pytest.raises(ValidationError):
        boundstate.Grid2D(b_min=1.0, b_max=0.0)


@pytest.fixture(scope="module")
def h2_solution():
    grid = boundstate.Grid2D(n_q=384, n_b=96)
    return boundstate.solve_h2(CASE_A, grid=grid, k=3)


def test_lowest_states_localize_in_distinct_wells(h2_solution):
    sol = h2_solution
    assert list(sol.well_label) == [0, 1, -1]
    # all tightly localized near phi_b = 0
    assert np.all(np.abs(sol.phi_b_mean) < 0.05 * math.pi)
    assert np.all(np.sqrt(sol.var_phi_b) < 0.2 * math.pi)


def test_coupled_ground_state_matches_1d_qubit(h2_solution):
    p0 = quantum1d.initial_phase(CASE_A, 0)
    assert h2_solution.phi_q_mean[0] == pytest.approx(p0, abs=1e-3 * math.pi)


def test_separable_limit_matches_1d_sums():
    """Without coupling, 2D energies are sums of the 1D mode energies."""
    grid = boundstate.Grid2D(n_q=384, n_b=128)
    sol2 = boundstate.solve_h2(CASE_A, grid=grid, k=3,
                               include_coupling=False)

    # 1D qubit energies on a matching grid
    g1 = quantum1d.PhaseGrid(min=grid.q_min, max=grid.q_max, n=grid.n_q)
    sol_q = quantum1d.eigensolve(
        quantum1d.build_hamiltonian(g1, CASE_A), 3)

    # 1D interface-mode energies on the phi_b axis
    _, c_b2, c_rail, c_pair = boundstate._threemode_coeffs(CASE_A)
    _, m_b, _ = boundstate.masses(CASE_A)
    b = np.linspace(grid.b_min, grid.b_max, grid.n_b)
    h = b[1] - b[0]
    kin = CASE_A.beta2 ** 2 / (2.0 * m_b)
    diag = (2.0 * kin / h ** 2 + c_b2 * b ** 2 + c_rail * (1.0 - np.cos(b))
            + c_pair * (1.0 - np.cos(0.5 * b)))
    off = np.full(grid.n_b - 1, -kin / h ** 2)
    gb = quantum1d.PhaseGrid(min=grid.b_min, max=grid.b_max, n=grid.n_b)
    sol_b = quantum1d.eigensolve(
        quantum1d.TridiagonalHamiltonian(gb, diag, off), 1)

    expected = np.sort(sol_q.energies[:3] + sol_b.energies[0])
    assert np.allclose(sol2.energies, expected, rtol=1e-4, atol=1e-6)


def test_state_csv_rows(h2_solution):
    rows = list(h2_solution.state_csv_rows(0))
    grid = h2_solution.grid
    assert len(rows) == grid.n_q * grid.n_b
    dens = np.array([r[2] for r in rows])
    cell = grid.dq * grid.db
    assert dens.sum() * cell == pytest.approx(1.0, rel=1e-6)
