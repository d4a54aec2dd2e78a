"""Full classical circuit simulator for the two-LJJ / interface / fluxonium system.

Every JJ phase is an explicit degree of freedom.  Phases are stored per side
ordered from the interface outward: index 0 is the termination JJ (phi_L or
phi_R), indices 1..n_cells-1 are the bulk JJs.  The rail phase is never
stored; flux quantization fixes phi_B = phi_L - phi_R.

Units: time 1/omega_J, positions lambda_J, energies E_0.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError, ValidationError
from .params import CircuitParams, fluxon_energy, fluxon_width
from . import quantum1d, soliton

DEFAULT_DT = 0.005
DEFAULT_T_END = 65.0
DEFAULT_X0 = -10.0

BOUNCE_THRESHOLD = 0.1 * math.pi     # peak prominence for bounce counting
ACTIVITY_THRESHOLD = 0.05 * math.pi  # |phi_B| window defining the measurement
EXIT_RADIUS = 5.0                    # |X| beyond which a channel is decided

CHANNELS = ("TransmittedFluxon", "ReflectedFluxon", "TransmittedAntifluxon",
            "ReflectedAntifluxon", "Trapped", "Undecided")


@dataclass
class LatticeState:
    """Phases and phase velocities of all JJs plus the fluxonium."""

    phi_left: np.ndarray
    phi_right: np.ndarray
    dphi_left: np.ndarray
    dphi_right: np.ndarray
    phi_q: float
    dphi_q: float
    t: float = 0.0

    @property
    def phi_b(self) -> float:
        """Rail phase from flux quantization, phi_B = phi_L - phi_R."""
        return float(self.phi_left[0] - self.phi_right[0])

    def copy(self) -> "LatticeState":
        return LatticeState(self.phi_left.copy(), self.phi_right.copy(),
                            self.dphi_left.copy(), self.dphi_right.copy(),
                            self.phi_q, self.dphi_q, self.t)


@dataclass
class LatticeTrajectory:
    """Strided samples of a lattice run with per-sample diagnostics."""

    times: np.ndarray
    phi_b: np.ndarray
    phi_q: np.ndarray
    energy: np.ndarray            # total energy, E_0
    xl_fit: np.ndarray
    xr_fit: np.ndarray
    v_in: float
    params: CircuitParams
    final_state: LatticeState
    snapshots: list = field(default_factory=list)  # (t, phi_left, phi_right)


@dataclass
class ScatterOutcome:
    channel: str
    bounce_count: int
    max_phi_b: float
    energy_retention: float
    measurement_time: float       # Josephson periods with |phi_B| above threshold
    measurement_time_ns: float | None = None

    def as_dict(self) -> dict:
        return {
            "channel": self.channel,
            "bounce_count": self.bounce_count,
            "max_phi_b_over_pi": self.max_phi_b / math.pi,
            "energy_retention": self.energy_retention,
            "measurement_time_periods": self.measurement_time,
            "measurement_time_ns": self.measurement_time_ns,
        }


def positions(params: CircuitParams, side: str) -> np.ndarray:
    """JJ positions x_k = -+ a(k + 1/2) in lambda_J units."""
    a = params.discreteness
    x = (np.arange(params.n_cells) + 0.5) * a
    return -x if side == "left" else x


def init_state(params: CircuitParams, v_over_c: float, x0: float = DEFAULT_X0,
               qubit_init: float | int = 0) -> LatticeState:
    """Ballistic right-moving fluxon in the left LJJ, interface at rest.

    ``qubit_init`` selects the fluxonium configuration: an int is interpreted
    as an eigenstate index n (the phase is set to <phi_q>_n), a float as a
    raw phase in radians.
    """
    if x0 > -3.0:
        raise ValidationError(f"x0={x0} too close to the interface (need <= -3)")
    width = fluxon_width(v_over_c)
    n = params.n_cells
    x_l = positions(params, "left")
    sigma = params.sigma

    # Mirror-ansatz field: for either polarity the phases vanish at the
    # interface, leaving no spurious winding against the resting right side.
    phi_left = soliton.ansatz_field(x_l, x0, 0.0, width, "left", sigma)
    dphi_left = -v_over_c * soliton.soliton_slope(x_l, sigma, x0, width)
    # Interface and right LJJ at rest.
    phi_left[0] = 0.0
    dphi_left[0] = 0.0
    phi_right = np.zeros(n)
    dphi_right = np.zeros(n)

    if isinstance(qubit_init, (int, np.integer)) and not isinstance(qubit_init, bool):
        phi_q = quantum1d.initial_phase(params, int(qubit_init))
    else:
        phi_q = float(qubit_init)
    return LatticeState(phi_left, phi_right, dphi_left, dphi_right,
                        phi_q=phi_q, dphi_q=0.0)


def _interface_mass(params: CircuitParams) -> tuple[float, float]:
    """Diagonal and off-diagonal kinetic couplings of (phi_L, phi_R)."""
    alpha = params.cj_term + params.cj_rail
    gamma = params.cj_rail
    return alpha, gamma


def eom_rhs(state: LatticeState, params: CircuitParams) -> tuple[np.ndarray, np.ndarray, float]:
    """Accelerations of all stored phases (left array, right array, phi_q)."""
    kappa = params.lam ** 2                  # (lambda_J/a)^2 = L_J/L
    elq_j = params.lam ** 2 / params.lq      # E_L^q / E_J
    ejq_j = params.ic_q                      # E_J^q / E_J

    acc_l = np.empty_like(state.phi_left)
    acc_r = np.empty_like(state.phi_right)

    for phi, acc in ((state.phi_left, acc_l), (state.phi_right, acc_r)):
        # Bulk: discrete sine-Gordon force; free (open) outer end.
        lap = np.zeros_like(phi)
        lap[1:-1] = phi[2:] - 2.0 * phi[1:-1] + phi[:-2]
        lap[-1] = phi[-2] - phi[-1]
        acc[:] = kappa * lap - np.sin(phi)

    phi_l0 = state.phi_left[0]
    phi_r0 = state.phi_right[0]
    phi_b = phi_l0 - phi_r0
    u = state.phi_q - params.phi_ext - phi_b

    f_l = (kappa * (state.phi_left[1] - phi_l0)
           - params.ic_term * math.sin(phi_l0)
           - params.ic_rail * math.sin(phi_b)
           + elq_j * u)
    f_r = (kappa * (state.phi_right[1] - phi_r0)
           - params.ic_term * math.sin(phi_r0)
           + params.ic_rail * math.sin(phi_b)
           - elq_j * u)
    alpha, gamma = _interface_mass(params)
    det = alpha ** 2 - gamma ** 2
    acc_l[0] = (alpha * f_l + gamma * f_r) / det
    acc_r[0] = (gamma * f_l + alpha * f_r) / det

    acc_q = (-ejq_j * math.sin(state.phi_q) - elq_j * u) / params.cj_q
    return acc_l, acc_r, acc_q


def total_energy(state: LatticeState, params: CircuitParams) -> float:
    """Total conserved energy (Legendre transform of the Lagrangian), in E_0."""
    kappa = params.lam ** 2
    elq_j = params.lam ** 2 / params.lq
    ejq_j = params.ic_q

    e = 0.0
    for phi, dphi in ((state.phi_left, state.dphi_left),
                      (state.phi_right, state.dphi_right)):
        e += 0.5 * float(np.sum(dphi[1:] ** 2))
        e += float(np.sum(1.0 - np.cos(phi[1:])))
        e += 0.5 * kappa * float(np.sum(np.diff(phi) ** 2))

    dphi_l0 = state.dphi_left[0]
    dphi_r0 = state.dphi_right[0]
    phi_b = state.phi_b
    e += 0.5 * params.cj_term * (dphi_l0 ** 2 + dphi_r0 ** 2)
    e += 0.5 * params.cj_rail * (dphi_l0 - dphi_r0) ** 2
    e += params.ic_term * (2.0 - math.cos(state.phi_left[0])
                           - math.cos(state.phi_right[0]))
    e += params.ic_rail * (1.0 - math.cos(phi_b))
    e += 0.5 * params.cj_q * state.dphi_q ** 2
    e += ejq_j * (1.0 - math.cos(state.phi_q))
    e += 0.5 * elq_j * (state.phi_q - params.phi_ext - phi_b) ** 2
    return e * params.discreteness  # E_J -> E_0


def field_energy(state: LatticeState, params: CircuitParams) -> float:
    """Energy of the LJJs plus interface, excluding the fluxonium terms, in E_0."""
    elq_j = params.lam ** 2 / params.lq
    e_q = (0.5 * params.cj_q * state.dphi_q ** 2
           + params.ic_q * (1.0 - math.cos(state.phi_q))
           + 0.5 * elq_j * (state.phi_q - params.phi_ext - state.phi_b) ** 2)
    return total_energy(state, params) - e_q * params.discreteness


def run(state: LatticeState, params: CircuitParams, t_end: float = DEFAULT_T_END,
        dt: float = DEFAULT_DT, sample_stride: int = 10,
        store_fields: bool = False, fit_stride: int | None = None,
        v_in: float | None = None) -> LatticeTrajectory:
    """Velocity-Verlet integration of the circuit equations of motion.

    Deterministic for given (state, params, dt).  ``fit_stride`` controls how
    often the collective coordinates are fitted (in units of samples).
    """
    if dt > 0.02:
        raise ValidationError(f"dt={dt} exceeds the 0.02/omega_J stability bound")
    state = state.copy()
    n_steps = int(round((t_end - state.t) / dt))
    width = fluxon_width(v_in) if v_in is not None else _guess_width(state, params)
    fit_stride = fit_stride if fit_stride is not None else 1

    times, phib, phiq, energy, xl, xr = [], [], [], [], [], []
    snapshots: list = []

    acc_l, acc_r, acc_q = eom_rhs(state, params)

    def record() -> None:
        times.append(state.t)
        phib.append(state.phi_b)
        phiq.append(state.phi_q)
        energy.append(total_energy(state, params))
        if len(times) % fit_stride == 1 or fit_stride == 1:
            fit = soliton.fit_cc(state.phi_left, state.phi_right, params, width)
            xl.append(fit.xl)
            xr.append(fit.xr)
        else:
            xl.append(xl[-1])
            xr.append(xr[-1])
        if store_fields:
            snapshots.append((state.t, state.phi_left.copy(),
                              state.phi_right.copy()))

    record()
    for step in range(n_steps):
        state.dphi_left += 0.5 * dt * acc_l
        state.dphi_right += 0.5 * dt * acc_r
        state.dphi_q += 0.5 * dt * acc_q
        state.phi_left += dt * state.dphi_left
        state.phi_right += dt * state.dphi_right
        state.phi_q += dt * state.dphi_q
        state.t += dt
        acc_l, acc_r, acc_q = eom_rhs(state, params)
        state.dphi_left += 0.5 * dt * acc_l
        state.dphi_right += 0.5 * dt * acc_r
        state.dphi_q += 0.5 * dt * acc_q
        if (step + 1) % sample_stride == 0 or step == n_steps - 1:
            if not (np.all(np.isfinite(state.phi_left))
                    and np.all(np.isfinite(state.phi_right))
                    and math.isfinite(state.phi_q)):
                raise NumericalError(f"non-finite phases at t={state.t:.3f}")
            record()

    return LatticeTrajectory(
        times=np.array(times), phi_b=np.array(phib), phi_q=np.array(phiq),
        energy=np.array(energy), xl_fit=np.array(xl), xr_fit=np.array(xr),
        v_in=abs(v_in) if v_in is not None else float("nan"),
        params=params, final_state=state, snapshots=snapshots)


def _guess_width(state: LatticeState, params: CircuitParams) -> float:
    """Adiabatic width from the initial kinetic content of the left side."""
    # v/c from the peak slope relation max|dphi/dt| = 2 v / (c W), W^2 = 1 - v^2
    peak = float(np.max(np.abs(state.dphi_left)))
    if peak < 1e-9:
        return 1.0
    v = peak / math.hypot(2.0, peak)  # solves peak = 2 v / sqrt(1 - v^2)
    return fluxon_width(v)


# ---------------------------------------------------------------------------
# Outcome classification
# ---------------------------------------------------------------------------

def count_bounces(times: np.ndarray, phi_b: np.ndarray,
                  threshold: float = BOUNCE_THRESHOLD) -> int:
    """Number of local maxima of |phi_B(t)| above the threshold."""
    mag = np.abs(phi_b)
    peaks = 0
    for i in range(1, len(mag) - 1):
        if mag[i] >= threshold and mag[i] >= mag[i - 1] and mag[i] > mag[i + 1]:
            peaks += 1
    return peaks


def classify_outcome(traj: LatticeTrajectory, params: CircuitParams,
                     fj_ghz: float | None = None) -> ScatterOutcome:
    """Channel, bounce count and measurement metrics from a trajectory."""
    xl, xr = traj.xl_fit, traj.xr_fit
    t = traj.times
    channel, exit_idx, exit_side = soliton.channel_from_tracks(
        xl, xr, exit_radius=EXIT_RADIUS)

    mag = np.abs(traj.phi_b)
    max_phi_b = float(mag.max())
    dt_sample = float(t[1] - t[0]) if len(t) > 1 else 0.0
    active = float(np.sum(mag > ACTIVITY_THRESHOLD)) * dt_sample
    measurement_periods = active / (2.0 * math.pi)
    bounce = count_bounces(t, traj.phi_b)

    if channel is None:
        late = slice(int(0.75 * len(t)), None)
        trapped = (np.max(np.abs(xl[late])) < 3.0
                   and np.max(np.abs(xr[late])) < 3.0)
        channel = "Trapped" if trapped else "Undecided"
        return ScatterOutcome(channel=channel, bounce_count=bounce,
                              max_phi_b=max_phi_b, energy_retention=float("nan"),
                              measurement_time=measurement_periods,
                              measurement_time_ns=_to_ns(measurement_periods, fj_ghz))

    retention = energy_retention(traj, params, exit_idx=exit_idx,
                                 exit_side=exit_side)
    return ScatterOutcome(channel=channel, bounce_count=bounce,
                          max_phi_b=max_phi_b, energy_retention=retention,
                          measurement_time=measurement_periods,
                          measurement_time_ns=_to_ns(measurement_periods, fj_ghz))


def _to_ns(periods: float, fj_ghz: float | None) -> float | None:
    return periods / fj_ghz if fj_ghz else None


def energy_retention(traj: LatticeTrajectory, params: CircuitParams,
                     exit_idx: int | None = None,
                     exit_side: str | None = None) -> float:
    """E_out/E_in from the late-time slope of the outgoing fitted coordinate."""
    if exit_idx is None:
        _, exit_idx, exit_side = soliton.channel_from_tracks(
            traj.xl_fit, traj.xr_fit, exit_radius=EXIT_RADIUS)
    if exit_idx is None:
        raise ValidationError("trajectory outcome undecided; cannot fit retention")
    coord = traj.xl_fit if exit_side == "left" else traj.xr_fit
    # Fit over the outgoing stretch |X| in (EXIT_RADIUS, FIT_DOMAIN).
    sel = (np.abs(coord) > EXIT_RADIUS) & (np.abs(coord) < soliton.FIT_DOMAIN - 0.3)
    sel &= traj.times >= traj.times[exit_idx] - 1e-9
    if np.sum(sel) < 4:
        sel = slice(exit_idx, min(exit_idx + 20, len(traj.times)))
    v_out = soliton.outgoing_velocity(traj.times[sel], coord[sel])
    v_in = traj.v_in
    if not math.isfinite(v_in):
        raise ValidationError("trajectory has no recorded incoming velocity")
    return soliton.energy_retention_from_velocities(v_in, v_out)


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

def trajectory_to_csv(traj: LatticeTrajectory, path: str) -> None:
    """Write per-sample diagnostics as CSV."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_omegaJ", "phi_b", "phi_q", "energy_E0",
                         "xl_fit", "xr_fit"])
        for row in zip(traj.times, traj.phi_b, traj.phi_q, traj.energy,
                       traj.xl_fit, traj.xr_fit):
            writer.writerow([f"{v:.9g}" for v in row])


def snapshots_to_csv(traj: LatticeTrajectory, path: str) -> None:
    """Write full-field snapshots (one row per JJ per sample time)."""
    params = traj.params
    x_l = positions(params, "left")
    x_r = positions(params, "right")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_omegaJ", "x_lambdaJ", "phi"])
        for t, phi_l, phi_r in traj.snapshots:
            for x, p in zip(x_l[::-1], phi_l[::-1]):
                writer.writerow([f"{t:.9g}", f"{x:.9g}", f"{p:.9g}"])
            for x, p in zip(x_r, phi_r):
                writer.writerow([f"{t:.9g}", f"{x:.9g}", f"{p:.9g}"])
