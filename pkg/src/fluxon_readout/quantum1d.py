"""Fluxonium spectral solver and driven time-dependent Schroedinger propagation.

The fluxonium Hamiltonian, biased by the interface rail phase phi_B,

    H(phi_q; phi_B) = 4 E_c^q n_q^2 + E_J^q (1 - cos phi_q)
                      + (E_L^q / 2) (phi_q - phi_B - phi_ext)^2

is discretized by central finite differences on a phi_q grid.  All energies
are expressed in units of E_0; the effective Planck constant in these units
is hbar*omega_J/E_0 = beta^2, so 4 E_c^q/E_0 = beta^4 / (2 M_q).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import eigh_tridiagonal, solve_banded

from .errors import NumericalError, ValidationError
from .params import CircuitParams

DEFAULT_GRID_MIN = -4.0 * math.pi
DEFAULT_GRID_MAX = 6.0 * math.pi
DEFAULT_GRID_N = 1024


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform grid in the qubit phase phi_q."""

    min: float = DEFAULT_GRID_MIN
    max: float = DEFAULT_GRID_MAX
    n: int = DEFAULT_GRID_N

    def __post_init__(self) -> None:
        if self.n < 128:
            raise ValidationError(f"grid needs n >= 128, got {self.n}")
        if not self.max > self.min:
            raise ValidationError("grid max must exceed min")

    @property
    def spacing(self) -> float:
        return (self.max - self.min) / (self.n - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.n)


@dataclass
class WaveFunction:
    """Complex amplitudes on a PhaseGrid, trapezoid-normalized to 1."""

    grid: PhaseGrid
    amplitudes: np.ndarray
    t: float = 0.0

    def norm(self) -> float:
        return float(np.sqrt(np.trapezoid(np.abs(self.amplitudes) ** 2,
                                          dx=self.grid.spacing)))

    def normalized(self) -> "WaveFunction":
        return WaveFunction(self.grid, self.amplitudes / self.norm(), self.t)

    def phase_expectation(self) -> float:
        dens = np.abs(self.amplitudes) ** 2
        return float(np.trapezoid(self.grid.points * dens, dx=self.grid.spacing)
                     / np.trapezoid(dens, dx=self.grid.spacing))


@dataclass(frozen=True)
class TridiagonalHamiltonian:
    """Symmetric tridiagonal operator on a PhaseGrid (units of E_0)."""

    grid: PhaseGrid
    diag: np.ndarray
    offdiag: np.ndarray

    def apply(self, psi: np.ndarray) -> np.ndarray:
        out = self.diag * psi
        out[:-1] += self.offdiag * psi[1:]
        out[1:] += self.offdiag * psi[:-1]
        return out

    def expectation(self, psi: np.ndarray, dx: float) -> float:
        return float(np.real(np.vdot(psi, self.apply(psi))) * dx)


def qubit_potential(phi, params: CircuitParams, phi_b: float = 0.0):
    """U_q(phi_q) + bias terms from phi_B, per E_0; vanishing coupling at phi_b=0."""
    phi = np.asarray(phi, float)
    return (params.ejq_over_e0 * (1.0 - np.cos(phi))
            + 0.5 * params.elq_over_e0 * (phi - phi_b - params.phi_ext) ** 2)


def build_hamiltonian(grid: PhaseGrid, params: CircuitParams,
                      phi_b: float = 0.0) -> TridiagonalHamiltonian:
    """Central-difference discretization of H(phi_q; phi_B) in E_0 units."""
    h = grid.spacing
    kin = params.beta2 ** 2 / (2.0 * params.mq)  # 4 E_c^q / E_0
    diag = 2.0 * kin / h ** 2 + qubit_potential(grid.points, params, phi_b)
    off = np.full(grid.n - 1, -kin / h ** 2)
    return TridiagonalHamiltonian(grid=grid, diag=diag, offdiag=off)


@dataclass
class EigenSolution:
    energies: np.ndarray          # ascending, units E_0
    states: np.ndarray            # (n_grid, k), real, trapezoid-normalized
    well_label: np.ndarray        # well index of each probability centroid
    grid: PhaseGrid

    def phase_expectation(self, m: int) -> float:
        dens = self.states[:, m] ** 2
        dx = self.grid.spacing
        return float(np.trapezoid(self.grid.points * dens, dx=dx)
                     / np.trapezoid(dens, dx=dx))


def eigensolve(op: TridiagonalHamiltonian, k: int) -> EigenSolution:
    """Lowest-k eigenpairs of a tridiagonal Hamiltonian."""
    if k > op.grid.n // 4:
        raise ValidationError(f"k={k} too large for grid n={op.grid.n}")
    try:
        energies, vecs = eigh_tridiagonal(op.diag, op.offdiag,
                                          select="i", select_range=(0, k - 1))
    except Exception as exc:  # pragma: no cover - LAPACK failure
        raise NumericalError(f"tridiagonal eigensolve failed: {exc}") from exc
    dx = op.grid.spacing
    vecs = vecs / math.sqrt(dx)   # unit trapezoid norm
    phi = op.grid.points
    labels = np.empty(k, dtype=int)
    for m in range(k):
        dens = vecs[:, m] ** 2
        centroid = np.trapezoid(phi * dens, dx=dx) / np.trapezoid(dens, dx=dx)
        labels[m] = int(round(centroid / (2.0 * math.pi)))
    return EigenSolution(energies=energies, states=vecs, well_label=labels,
                         grid=op.grid)


def transition_energy(params: CircuitParams, n_grid: int = DEFAULT_GRID_N,
                      phi_b: float = 0.0) -> float:
    """0-1 transition energy of the biased fluxonium, in units of E_0."""
    grid = PhaseGrid(n=n_grid)
    sol = eigensolve(build_hamiltonian(grid, params, phi_b), 2)
    return float(sol.energies[1] - sol.energies[0])


def initial_phase(params: CircuitParams, n: int, k: int = 4,
                  n_grid: int = DEFAULT_GRID_N) -> float:
    """Expectation value <phi_q>_n of the isolated fluxonium eigenstate n."""
    grid = PhaseGrid(n=n_grid)
    sol = eigensolve(build_hamiltonian(grid, params), max(k, n + 1))
    return sol.phase_expectation(n)


# ---------------------------------------------------------------------------
# Spectrum vs interface bias
# ---------------------------------------------------------------------------

@dataclass
class BiasSpectrum:
    phi_b: np.ndarray
    energies: np.ndarray          # (n_bias, k)
    crossing_phi_b: float         # gap minimum of the lowest two levels
    crossing_gap: float

    def gaps(self) -> np.ndarray:
        return self.energies[:, 1] - self.energies[:, 0]


def spectrum_vs_bias(params: CircuitParams, phi_b_values, k: int = 4,
                     grid: PhaseGrid | None = None) -> BiasSpectrum:
    """Eigenvalues of H(phi_q; phi_B) on a monotone list of bias values."""
    phi_b_values = np.asarray(phi_b_values, float)
    if np.any(np.diff(phi_b_values) <= 0.0):
        raise ValidationError("bias samples must be strictly increasing")
    grid = grid or PhaseGrid()
    table = np.empty((len(phi_b_values), k))
    for i, pb in enumerate(phi_b_values):
        sol = eigensolve(build_hamiltonian(grid, params, pb), k)
        table[i] = sol.energies
    gaps = table[:, 1] - table[:, 0]
    i0 = int(np.argmin(gaps))
    # Parabolic refinement of the gap minimum when interior.
    if 0 < i0 < len(gaps) - 1:
        x0, x1, x2 = phi_b_values[i0 - 1:i0 + 2]
        y0, y1, y2 = gaps[i0 - 1:i0 + 2]
        denom = (y0 - 2.0 * y1 + y2)
        if denom > 0.0:
            xc = x1 - 0.5 * (x2 - x0) / 2.0 * (y2 - y0) / denom
        else:
            xc = x1
    else:
        xc = phi_b_values[i0]
    return BiasSpectrum(phi_b=phi_b_values, energies=table,
                        crossing_phi_b=float(xc), crossing_gap=float(gaps[i0]))


def avoided_crossing_2level(params: CircuitParams, phi_b: float,
                            grid: PhaseGrid | None = None):
    """Minority diabatic weight of the upper level near the avoided crossing.

    The two-level model is built from the adiabatic gap at the requested bias
    and the minimal gap at the crossing phi_B* = pi - phi_ext: with detuning
    delta = sqrt(gap^2 - gap_min^2), the upper eigenvector carries weight
    |v0|^2 = (1 - |delta|/gap) / 2 on the minority diabatic state.

    Returns (weight, warning_flag); the flag is set when the bias is too far
    from the crossing for the two-level picture.
    """
    grid = grid or PhaseGrid()
    crossing = math.pi - params.phi_ext
    # crossing is periodic in the combined bias; take the branch nearest phi_b
    crossing += 2.0 * math.pi * round((phi_b - crossing) / (2.0 * math.pi))
    gap_min = transition_energy(params, n_grid=grid.n, phi_b=crossing)
    gap_here = transition_energy(params, n_grid=grid.n, phi_b=phi_b)
    ratio = min(gap_min / gap_here, 1.0)
    weight = 0.5 * (1.0 - math.sqrt(max(0.0, 1.0 - ratio ** 2)))
    warn = abs(phi_b - crossing) > 0.45 * math.pi
    return weight, warn


# ---------------------------------------------------------------------------
# Driven propagation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DriveTrace:
    """Uniformly sampled phi_B(t) drive, starting from phi_B = 0."""

    times: np.ndarray
    phi_b: np.ndarray

    def __post_init__(self) -> None:
        if len(self.times) != len(self.phi_b) or len(self.times) < 2:
            raise ValidationError("drive needs matching times/values, >= 2 samples")
        dt = np.diff(self.times)
        if not np.allclose(dt, dt[0], rtol=1e-6, atol=1e-12):
            raise ValidationError("drive must be uniformly sampled")
        if abs(self.phi_b[0]) > 1e-6:
            raise ValidationError("drive must start at phi_B = 0")

    def interpolator(self) -> CubicSpline:
        return CubicSpline(self.times, self.phi_b)


@dataclass
class BackactionReport:
    times: np.ndarray             # sample times
    cm_abs2: np.ndarray           # (n_samples, k) instantaneous-basis weights
    phi_q_mean: np.ndarray        # <phi_q>(t)
    phi_b: np.ndarray             # drive at the sample times
    initial_state: int
    final_infidelity: float       # sum_{m != n} |c_m|^2 at the last sample
    peak_infidelity: float
    norm_drift: float

    def infidelity(self) -> np.ndarray:
        return 1.0 - self.cm_abs2[:, self.initial_state]


def _cn_step(diag: np.ndarray, off: np.ndarray, psi: np.ndarray,
             r: float) -> np.ndarray:
    """One Crank-Nicolson step: (1 + i r H) psi' = (1 - i r H) psi."""
    n = len(psi)
    rhs = psi - 1j * r * (diag * psi)
    rhs[:-1] -= 1j * r * off * psi[1:]
    rhs[1:] -= 1j * r * off * psi[:-1]
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = 1j * r * off
    ab[1, :] = 1.0 + 1j * r * diag
    ab[2, :-1] = 1j * r * off
    return solve_banded((1, 1), ab, rhs)


def propagate_driven(psi0: WaveFunction, drive: DriveTrace,
                     params: CircuitParams, *, n_track: int = 6,
                     sample_stride: int = 10, initial_state: int = 0,
                     dt: float | None = None) -> BackactionReport:
    """Unitary propagation of the fluxonium under a phi_B(t) drive.

    Crank-Nicolson stepping with the Hamiltonian evaluated at mid-step bias;
    at every ``sample_stride``-th step the wave function is expanded in the
    instantaneous eigenbasis (lowest ``n_track`` states).
    """
    grid = psi0.grid
    if abs(psi0.norm() - 1.0) > 1e-6:
        raise ValidationError("psi0 must be normalized")
    spline = drive.interpolator()
    t0, t1 = float(drive.times[0]), float(drive.times[-1])
    dt = dt if dt is not None else float(drive.times[1] - drive.times[0])
    max_rate = float(np.max(np.abs(np.gradient(drive.phi_b, drive.times))))
    if max_rate * dt > 1e-2 * math.pi:
        raise ValidationError(
            f"bias change per step {max_rate * dt:.3g} exceeds 1e-2*pi; "
            "reduce dt")
    n_steps = int(round((t1 - t0) / dt))

    kin = params.beta2 ** 2 / (2.0 * params.mq)
    h = grid.spacing
    kin_diag = 2.0 * kin / h ** 2
    off = np.full(grid.n - 1, -kin / h ** 2)
    pot0 = params.ejq_over_e0 * (1.0 - np.cos(grid.points))
    phi_minus_ext = grid.points - params.phi_ext
    elq = params.elq_over_e0
    r = dt / (2.0 * params.beta2)  # hbar_eff = beta^2 in (E_0, 1/omega_J) units

    psi = psi0.amplitudes.astype(complex).copy()
    ref_states: np.ndarray | None = None

    times, weights, phiq_means, biases = [], [], [], []

    def sample(t: float, psi_now: np.ndarray) -> None:
        nonlocal ref_states
        pb = float(spline(t))
        diag = kin_diag + pot0 + 0.5 * elq * (phi_minus_ext - pb) ** 2
        sol = eigensolve(TridiagonalHamiltonian(grid, diag, off), n_track)
        states = sol.states
        if ref_states is not None:
            signs = np.sign(np.einsum("im,im->m", states, ref_states))
            signs[signs == 0.0] = 1.0
            states = states * signs
        ref_states = states
        cm = states.T @ psi_now * h
        dens = np.abs(psi_now) ** 2
        times.append(t)
        weights.append(np.abs(cm) ** 2)
        phiq_means.append(float(np.trapezoid(grid.points * dens, dx=h)
                                / np.trapezoid(dens, dx=h)))
        biases.append(pb)

    sample(t0, psi)
    t = t0
    for step in range(n_steps):
        pb_mid = float(spline(t + 0.5 * dt))
        diag = kin_diag + pot0 + 0.5 * elq * (phi_minus_ext - pb_mid) ** 2
        psi = _cn_step(diag, off, psi, r)
        t += dt
        if (step + 1) % sample_stride == 0 or step == n_steps - 1:
            norm = math.sqrt(float(np.sum(np.abs(psi) ** 2)) * h)
            if abs(norm - 1.0) > 1e-6:
                raise NumericalError(f"norm drift {abs(norm - 1.0):.3g} at t={t:.3f}")
            sample(t, psi)

    weights_arr = np.array(weights)
    infid = 1.0 - weights_arr[:, initial_state]
    norm_final = math.sqrt(float(np.sum(np.abs(psi) ** 2)) * h)
    return BackactionReport(
        times=np.array(times),
        cm_abs2=weights_arr,
        phi_q_mean=np.array(phiq_means),
        phi_b=np.array(biases),
        initial_state=initial_state,
        final_infidelity=float(infid[-1]),
        peak_infidelity=float(infid.max()),
        norm_drift=abs(norm_final - 1.0),
    )
