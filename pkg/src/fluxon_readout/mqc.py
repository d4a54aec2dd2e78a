"""Mixed quantum-classical propagation of the collective-coordinate model.

The two heavy coordinates (X_L, X_R) evolve classically under the fluxon
potential plus the mean coupling <psi|V_int|psi>, while the light qubit phase
evolves quantum mechanically under H_q + V_int at the instantaneous
coordinates (Ehrenfest mean-field scheme, Strang-split stepping).  An
adiabatic variant replaces the wave function at every step by the tracked
instantaneous eigenstate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import ccmodel, quantum1d, soliton
from .ccmodel import CCState, cc_eom_rhs, masses
from .errors import NumericalError, ValidationError
from .lattice import ScatterOutcome
from .params import CircuitParams, fluxon_width
from .quantum1d import PhaseGrid, TridiagonalHamiltonian, WaveFunction


@dataclass
class MQCState:
    """Classical coordinates plus the qubit wave function."""

    xl: float
    xr: float
    vxl: float
    vxr: float
    psi: WaveFunction
    width: float
    t: float = 0.0

    def __post_init__(self) -> None:
        if abs(self.psi.norm() - 1.0) > 1e-6:
            raise ValidationError("psi must be normalized")


@dataclass
class MQCReport:
    """Sampled mixed quantum-classical trajectory and qubit weights."""

    times: np.ndarray
    xl: np.ndarray
    xr: np.ndarray
    phi_b: np.ndarray             # ansatz interface phase difference
    phi_q_mean: np.ndarray
    energy: np.ndarray            # classical + <H_q + V_int>, units E_0
    cm_abs2: np.ndarray           # (n_samples, n_track)
    initial_state: int
    final_infidelity: float
    outcome: ScatterOutcome
    final_state: MQCState
    overlap_flagged: bool = False  # adiabatic tracking ambiguity seen


def initial_mqc_state(params: CircuitParams, v_over_c: float,
                      x0: float = -10.0, n: int = 0,
                      grid: PhaseGrid | None = None) -> MQCState:
    """Incoming fluxon with the qubit in the n-th isolated eigenstate."""
    if x0 > -5.0:
        raise ValidationError(f"initial xl must be <= -5, got {x0}")
    grid = grid or PhaseGrid()
    sol = quantum1d.eigensolve(quantum1d.build_hamiltonian(grid, params),
                               n + 1)
    psi = WaveFunction(grid, sol.states[:, n].astype(complex))
    return MQCState(xl=x0, xr=0.0, vxl=abs(v_over_c), vxr=0.0,
                    psi=psi, width=fluxon_width(v_over_c))


def _dphi(xl: float, xr: float, width: float, sigma: int) -> float:
    return (soliton.phi_left(xl, width, sigma)
            - soliton.phi_right(xr, width, sigma))


def _qubit_operator(dphi: float, grid: PhaseGrid,
                    params: CircuitParams) -> TridiagonalHamiltonian:
    """H_q + V_int at frozen coordinates, tridiagonal in phi_q (E_0 units)."""
    h = grid.spacing
    kin = params.beta2 ** 2 / (2.0 * params.mq)
    q = grid.points
    elq = params.elq_over_e0
    diag = (2.0 * kin / h ** 2
            + params.ejq_over_e0 * (1.0 - np.cos(q))
            + 0.5 * elq * (q - params.phi_ext) ** 2
            - elq * dphi * (q - params.phi_ext))
    off = np.full(grid.n - 1, -kin / h ** 2)
    return TridiagonalHamiltonian(grid=grid, diag=diag, offdiag=off)


def _classical_half_step(state: MQCState, params: CircuitParams,
                         phi_q_mean: float, dt: float) -> None:
    """RK4 update of (X_L, X_R, velocities) with the qubit mean frozen."""
    w = state.width

    def deriv(y):
        st = CCState(y[0], y[1], phi_q_mean, y[2], y[3], 0.0, w)
        axl, axr, _ = cc_eom_rhs(st, params)
        return np.array([y[2], y[3], axl, axr])

    y = np.array([state.xl, state.xr, state.vxl, state.vxr])
    k1 = deriv(y)
    k2 = deriv(y + 0.5 * dt * k1)
    k3 = deriv(y + 0.5 * dt * k2)
    k4 = deriv(y + dt * k3)
    y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    state.xl, state.xr, state.vxl, state.vxr = y


def _mqc_energy(state: MQCState, params: CircuitParams,
                op: TridiagonalHamiltonian) -> float:
    mm = masses(state.xl, state.xr, params, state.width)
    kin = (0.5 * mm.m_ll * state.vxl ** 2 + 0.5 * mm.m_rr * state.vxr ** 2
           + mm.m_lr * state.vxl * state.vxr)
    u_fl = ccmodel.potential(state.xl, state.xr, 0.0, params,
                             state.width).u_fl
    quantum = op.expectation(state.psi.amplitudes, state.psi.grid.spacing)
    return kin + u_fl + quantum


def _run(initial: MQCState, params: CircuitParams, t_end: float, dt: float,
         adiabatic: bool, n_track: int, sample_stride: int,
         initial_state: int, energy_tol: float) -> MQCReport:
    if dt <= 0.0 or t_end <= initial.t:
        raise ValidationError("need dt > 0 and t_end > initial time")
    state = MQCState(initial.xl, initial.xr, initial.vxl, initial.vxr,
                     WaveFunction(initial.psi.grid,
                                  initial.psi.amplitudes.copy()),
                     initial.width, initial.t)
    grid = state.psi.grid
    h = grid.spacing
    sigma = params.sigma
    elq = params.elq_over_e0
    psi = state.psi.amplitudes.astype(complex)
    overlap_flagged = False

    times, xls, xrs, phibs, qmeans, energies, weights = ([] for _ in range(7))

    def mean_phi_q(p) -> float:
        dens = np.abs(p) ** 2
        return float(np.trapezoid(grid.points * dens, dx=h)
                     / np.trapezoid(dens, dx=h))

    def sample() -> None:
        dphi = _dphi(state.xl, state.xr, state.width, sigma)
        op = _qubit_operator(dphi, grid, params)
        sol = quantum1d.eigensolve(op, n_track)
        cm = sol.states.T @ psi * h
        times.append(state.t)
        xls.append(state.xl)
        xrs.append(state.xr)
        phibs.append(dphi)
        qmeans.append(mean_phi_q(psi))
        energies.append(_mqc_energy(state, params, op))
        weights.append(np.abs(cm) ** 2)

    state.psi.amplitudes = psi
    sample()
    e0 = energies[0]
    n_steps = int(round((t_end - state.t) / dt))
    arrived = False
    exit_time = None

    for step in range(n_steps):
        qm = mean_phi_q(psi)
        _classical_half_step(state, params, qm, 0.5 * dt)

        dphi = _dphi(state.xl, state.xr, state.width, sigma)
        op = _qubit_operator(dphi, grid, params)
        if adiabatic:
            sol = quantum1d.eigensolve(op, n_track)
            overlaps = np.abs(sol.states.T @ psi * h)
            best = int(np.argmax(overlaps))
            if overlaps[best] < 0.5:
                overlap_flagged = True
            phase = np.vdot(sol.states[:, best], psi)
            sign = 1.0 if phase.real >= 0.0 else -1.0
            psi = sign * sol.states[:, best].astype(complex)
        else:
            # Substep so the bias change per quantum step stays < 1e-2 pi.
            g_max = 4.0 / state.width
            rate = g_max * (abs(state.vxl) + abs(state.vxr))
            n_sub = max(1, int(math.ceil(rate * dt / (1e-2 * math.pi))))
            r = dt / n_sub / (2.0 * params.beta2)
            for _ in range(n_sub):
                psi = quantum1d._cn_step(op.diag, op.offdiag, psi, r)

        qm = mean_phi_q(psi)
        _classical_half_step(state, params, qm, 0.5 * dt)
        state.t += dt

        if (step + 1) % sample_stride == 0 or step == n_steps - 1:
            state.psi.amplitudes = psi
            norm = math.sqrt(float(np.sum(np.abs(psi) ** 2)) * h)
            if abs(norm - 1.0) > 1e-6:
                raise NumericalError(
                    f"norm drift {abs(norm - 1.0):.3g} at t={state.t:.2f}")
            sample()
            if not adiabatic and abs(energies[-1] - e0) > energy_tol * abs(e0):
                raise NumericalError(
                    f"energy drift {abs(energies[-1] - e0) / abs(e0):.3g} "
                    f"at t={state.t:.2f}")
            arrived = arrived or abs(state.xl) < 3.0
            if arrived and (max(abs(state.xl), abs(state.xr))
                            > ccmodel.EXIT_RADIUS + 2.0):
                if exit_time is None:
                    exit_time = state.t
                elif state.t - exit_time > 3.0:
                    break

    weights_arr = np.array(weights)
    cc_traj = ccmodel.CCTrajectory(
        times=np.array(times), xl=np.array(xls), xr=np.array(xrs),
        phi_q=np.array(qmeans), phi_b=np.array(phibs),
        energy=np.array(energies),
        final_state=CCState(state.xl, state.xr, qmeans[-1],
                            state.vxl, state.vxr, 0.0, state.width))
    outcome = ccmodel.classify_cc(cc_traj, params)
    state.psi.amplitudes = psi
    return MQCReport(
        times=np.array(times), xl=np.array(xls), xr=np.array(xrs),
        phi_b=np.array(phibs), phi_q_mean=np.array(qmeans),
        energy=np.array(energies), cm_abs2=weights_arr,
        initial_state=initial_state,
        final_infidelity=float(1.0 - weights_arr[-1, initial_state]),
        outcome=outcome, final_state=state, overlap_flagged=overlap_flagged,
    )


def run_mqc(initial: MQCState, params: CircuitParams, t_end: float = 80.0,
            dt: float = 2e-3, *, n_track: int = 6, sample_stride: int = 25,
            initial_state: int = 0, energy_tol: float = 1e-3) -> MQCReport:
    """Ehrenfest propagation: classical (X_L, X_R), quantum phi_q."""
    return _run(initial, params, t_end, dt, adiabatic=False,
                n_track=n_track, sample_stride=sample_stride,
                initial_state=initial_state, energy_tol=energy_tol)


def run_adiabatic(initial: MQCState, params: CircuitParams,
                  t_end: float = 80.0, dt: float = 2e-3, *,
                  n_track: int = 6, sample_stride: int = 25,
                  initial_state: int = 0) -> MQCReport:
    """Adiabatic variant: psi pinned to the tracked instantaneous eigenstate."""
    return _run(initial, params, t_end, dt, adiabatic=True,
                n_track=n_track, sample_stride=sample_stride,
                initial_state=initial_state, energy_tol=math.inf)


def report_to_csv(report: MQCReport, path: str) -> None:
    """Write t, coordinates, qubit mean, energy and basis weights as CSV."""
    k = report.cm_abs2.shape[1]
    header = ("t_omegaJ,xl,xr,phi_b,phi_q_mean,energy_E0,"
              + ",".join(f"c{m}_abs2" for m in range(k)))
    table = np.column_stack([report.times, report.xl, report.xr,
                             report.phi_b, report.phi_q_mean, report.energy,
                             report.cm_abs2])
    np.savetxt(path, table, delimiter=",", header=header, comments="")
