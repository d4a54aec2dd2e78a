"""Steady states of the coupled LJJ-qubit system without a moving fluxon.

Small interface amplitudes excite evanescent fields in the arrays,
phi_k = phi_{L,R} exp(-mu a k).  Each array then reduces to an effective
junction and an effective inductance in parallel with its termination JJ.
The resulting three-mode Hamiltonian in (phi_LR, phi_B, phi_q), with
phi_LR = (phi_L + phi_R)/2 and phi_B = phi_L - phi_R, yields steady-state
masses, local frequencies and ground-state phase uncertainties; dropping the
stiff phi_LR mode leaves a two-mode Hamiltonian in (phi_q, phi_B) whose
lowest eigenstates are computed on a finite-difference grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import minimize
from scipy.sparse.linalg import eigsh

from .errors import NumericalError, ValidationError
from .params import CircuitParams


# ---------------------------------------------------------------------------
# Evanescent-field reduction of the arrays
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EvanescentParams:
    """Decay constant and effective single-element parameters of one array."""

    mu_a: float                   # inverse decay length times cell length
    cj_eff: float                 # C_eff / C_J
    ic_eff: float                 # I_eff / I_c
    l_eff: float                  # L_eff / L


def evanescent_params(params: CircuitParams) -> EvanescentParams:
    """Effective junction/inductor replacing each semi-infinite array.

    The decay constant follows from the zero-frequency limit of the bulk
    dispersion relation omega^2 = omega_J^2 + 2(c/a)^2 (1 - cosh(mu a)):
    mu a = arccosh(1 + a^2 / (2 lambda_J^2)).
    """
    a = params.discreteness
    mu_a = math.acosh(1.0 + 0.5 * a * a)
    e1 = math.expm1(mu_a)             # e^{mu a} - 1
    e2 = math.expm1(2.0 * mu_a)       # e^{2 mu a} - 1
    eff = 1.0 / e2
    return EvanescentParams(mu_a=mu_a, cj_eff=eff, ic_eff=eff,
                            l_eff=(e1 + 2.0) / e1)


# ---------------------------------------------------------------------------
# Three-mode steady-state analysis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SteadyStateReport:
    """Masses, local frequencies and ground-state uncertainties."""

    phi_lr: float                 # steady-state values
    phi_b: float
    phi_q: float
    m_lr: float                   # dimensionless masses
    m_b: float
    m_q: float
    omega_lr: float               # local frequencies over omega_J
    omega_b: float
    omega_q: float
    var_phi_lr: float             # ground-state phase variances (rad^2)
    var_phi_b: float
    var_phi_q: float
    stable: bool                  # Hessian positive definite at the minimum


def _threemode_coeffs(params: CircuitParams):
    """Coefficients of the small-amplitude potential, in units of E_0."""
    a = params.discreteness
    lam = 1.0 / a
    ev = evanescent_params(params)
    c_lr2 = lam / ev.l_eff                       # phi_LR^2 coefficient
    c_b2 = 0.5 * lam * (0.5 / ev.l_eff + 1.0 / params.lq)
    c_rail = params.ic_rail * a
    c_pair = 2.0 * (params.ic_term + ev.ic_eff) * a
    return c_lr2, c_b2, c_rail, c_pair


def threemode_potential(phi_lr: float, phi_b: float, phi_q: float,
                        params: CircuitParams) -> float:
    """Potential of the reduced (phi_LR, phi_B, phi_q) system, in E_0."""
    c_lr2, c_b2, c_rail, c_pair = _threemode_coeffs(params)
    elq = params.elq_over_e0
    u = (c_lr2 * phi_lr ** 2
         + c_b2 * phi_b ** 2
         + c_rail * (1.0 - math.cos(phi_b))
         + c_pair * (1.0 - math.cos(phi_lr) * math.cos(0.5 * phi_b))
         + params.ejq_over_e0 * (1.0 - math.cos(phi_q))
         + 0.5 * elq * (phi_q - params.phi_ext) ** 2
         - elq * phi_b * (phi_q - params.phi_ext))
    return u


def masses(params: CircuitParams) -> tuple[float, float, float]:
    """(M_LR, M_B, M_q): dimensionless masses of the three modes."""
    a = params.discreteness
    ev = evanescent_params(params)
    term = params.cj_term + ev.cj_eff
    return (2.0 * term * a,
            (params.cj_rail + 0.5 * term) * a,
            params.mq)


def steadystate_report(params: CircuitParams) -> SteadyStateReport:
    """Minimize the three-mode potential and expand to harmonic order."""
    m_lr, m_b, m_q = masses(params)

    def u(y):
        return threemode_potential(y[0], y[1], y[2], params)

    # Start in the well nearest phi_q = 0 (the readout ground-state sector).
    res = minimize(u, x0=np.array([0.0, 0.0, 0.0]), method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20000})
    if not res.success:
        raise NumericalError(f"steady-state search failed: {res.message}")
    y0 = res.x

    # Central-difference Hessian.
    h = 1e-5
    hess = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            yi = np.array(y0)
            def shifted(si, sj):
                z = np.array(y0)
                z[i] += si * h
                z[j] += sj * h
                return u(z)
            hess[i, j] = (shifted(+1, +1) - shifted(+1, -1)
                          - shifted(-1, +1) + shifted(-1, -1)) / (4.0 * h * h)
    hess = 0.5 * (hess + hess.T)
    mass_vec = np.array([m_lr, m_b, m_q])
    stable = bool(np.all(np.linalg.eigvalsh(hess) > 0.0))

    # Local (diagonal) frequencies and harmonic ground-state variances.
    omega = np.sqrt(np.maximum(np.diag(hess), 0.0) / mass_vec)
    with np.errstate(divide="ignore"):
        var = np.where(omega > 0.0,
                       params.beta2 / (2.0 * mass_vec * omega), np.inf)
    return SteadyStateReport(
        phi_lr=float(y0[0]), phi_b=float(y0[1]), phi_q=float(y0[2]),
        m_lr=m_lr, m_b=m_b, m_q=m_q,
        omega_lr=float(omega[0]), omega_b=float(omega[1]),
        omega_q=float(omega[2]),
        var_phi_lr=float(var[0]), var_phi_b=float(var[1]),
        var_phi_q=float(var[2]),
        stable=stable,
    )


# ---------------------------------------------------------------------------
# Two-mode (phi_q, phi_B) eigenproblem
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Grid2D:
    """Uniform tensor grid over (phi_q, phi_B)."""

    q_min: float = -4.0 * math.pi
    q_max: float = 6.0 * math.pi
    b_min: float = -math.pi
    b_max: float = math.pi
    n_q: int = 512
    n_b: int = 128

    def __post_init__(self) -> None:
        if self.n_q < 64 or self.n_b < 32:
            raise ValidationError("2D grid too coarse (need n_q>=64, n_b>=32)")
        if not (self.q_max > self.q_min and self.b_max > self.b_min):
            raise ValidationError("grid bounds must be increasing")

    @property
    def dq(self) -> float:
        return (self.q_max - self.q_min) / (self.n_q - 1)

    @property
    def db(self) -> float:
        return (self.b_max - self.b_min) / (self.n_b - 1)

    @property
    def q_points(self) -> np.ndarray:
        return np.linspace(self.q_min, self.q_max, self.n_q)

    @property
    def b_points(self) -> np.ndarray:
        return np.linspace(self.b_min, self.b_max, self.n_b)


@dataclass
class H2Solution:
    """Lowest eigenstates of the coupled (phi_q, phi_B) Hamiltonian."""

    grid: Grid2D
    energies: np.ndarray          # ascending, units E_0
    states: np.ndarray            # (n_q, n_b, k), cell-normalized
    well_label: np.ndarray        # nearest 2*pi multiple of the phi_q centroid
    phi_q_mean: np.ndarray
    phi_b_mean: np.ndarray
    var_phi_q: np.ndarray
    var_phi_b: np.ndarray

    def state_csv_rows(self, m: int):
        """(phi_q, phi_B, density) rows for one eigenstate."""
        dens = self.states[:, :, m] ** 2
        q = self.grid.q_points
        b = self.grid.b_points
        for i in range(self.grid.n_q):
            for j in range(self.grid.n_b):
                yield q[i], b[j], dens[i, j]


def twomode_potential(params: CircuitParams, grid: Grid2D,
                      include_coupling: bool = True) -> np.ndarray:
    """Potential on the (phi_q, phi_B) grid with the phi_LR mode frozen."""
    _, c_b2, c_rail, c_pair = _threemode_coeffs(params)
    q = grid.q_points[:, None]
    b = grid.b_points[None, :]
    elq = params.elq_over_e0
    u = (params.ejq_over_e0 * (1.0 - np.cos(q))
         + 0.5 * elq * (q - params.phi_ext) ** 2
         + c_b2 * b ** 2
         + c_rail * (1.0 - np.cos(b))
         + c_pair * (1.0 - np.cos(0.5 * b)))
    if include_coupling:
        u = u - elq * b * (q - params.phi_ext)
    return u


def solve_h2(params: CircuitParams, grid: Grid2D | None = None,
             k: int = 6, include_coupling: bool = True) -> H2Solution:
    """Lowest-k eigenstates of the two-mode Hamiltonian by sparse FD."""
    grid = grid or Grid2D()
    _, m_b, m_q = masses(params)
    kin_q = params.beta2 ** 2 / (2.0 * m_q)
    kin_b = params.beta2 ** 2 / (2.0 * m_b)

    pot = twomode_potential(params, grid, include_coupling)
    nq, nb = grid.n_q, grid.n_b

    lap_q = sparse.diags([1.0, -2.0, 1.0], [-1, 0, 1],
                         shape=(nq, nq)) / grid.dq ** 2
    lap_b = sparse.diags([1.0, -2.0, 1.0], [-1, 0, 1],
                         shape=(nb, nb)) / grid.db ** 2
    ham = (-kin_q * sparse.kron(lap_q, sparse.identity(nb))
           - kin_b * sparse.kron(sparse.identity(nq), lap_b)
           + sparse.diags(pot.ravel()))
    try:
        energies, vecs = eigsh(ham.tocsc(), k=k, sigma=float(pot.min()),
                               which="LM")
    except Exception as exc:
        raise NumericalError(f"2D eigensolve failed: {exc}") from exc
    order = np.argsort(energies)
    energies = energies[order]
    vecs = vecs[:, order]

    cell = grid.dq * grid.db
    states = (vecs / math.sqrt(cell)).reshape(nq, nb, k)
    q = grid.q_points[:, None]
    b = grid.b_points[None, :]
    qc = np.empty(k)
    bc = np.empty(k)
    vq = np.empty(k)
    vb = np.empty(k)
    labels = np.empty(k, dtype=int)
    for m in range(k):
        dens = states[:, :, m] ** 2
        w = dens.sum() * cell
        qc[m] = (q * dens).sum() * cell / w
        bc[m] = (b * dens).sum() * cell / w
        vq[m] = (q ** 2 * dens).sum() * cell / w - qc[m] ** 2
        vb[m] = (b ** 2 * dens).sum() * cell / w - bc[m] ** 2
        labels[m] = int(round(qc[m] / (2.0 * math.pi)))
    return H2Solution(grid=grid, energies=np.asarray(energies),
                      states=states, well_label=labels,
                      phi_q_mean=qc, phi_b_mean=bc,
                      var_phi_q=vq, var_phi_b=vb)
