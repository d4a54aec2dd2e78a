"""Collective-coordinate model: two fluxon centers coupled to the fluxonium.

The many-JJ dynamics reduce to three coordinates (X_L, X_R, phi_q) moving in
an effective potential with position-dependent masses.  All gradients are
analytic.  Units: lengths lambda_J, time 1/omega_J, velocities c, energies
E_0; masses are dimensionless.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError, ValidationError
from .params import CircuitParams, fluxon_energy, fluxon_width
from . import quantum1d, soliton
from .lattice import ScatterOutcome, count_bounces, _to_ns, \
    ACTIVITY_THRESHOLD, EXIT_RADIUS

DEFAULT_DT = 1e-3
DEFAULT_T_END = 80.0


@dataclass
class CCState:
    """Collective coordinates, their velocities, and the width parameter."""

    xl: float
    xr: float
    phi_q: float
    vxl: float
    vxr: float
    vphi_q: float
    width: float
    t: float = 0.0

    def __post_init__(self) -> None:
        vals = (self.xl, self.xr, self.phi_q, self.vxl, self.vxr,
                self.vphi_q, self.width)
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError(f"non-finite CC state components: {vals}")
        if not 0.0 < self.width <= 1.0:
            raise ValidationError(f"width must be in (0, 1], got {self.width}")


@dataclass(frozen=True)
class MassMatrix:
    """Symmetric 2x2 coordinate-dependent mass of (X_L, X_R)."""

    m_ll: float
    m_rr: float
    m_lr: float

    def __post_init__(self) -> None:
        if self.m_ll <= 0.0 or self.m_ll * self.m_rr - self.m_lr ** 2 <= 0.0:
            raise NumericalError(
                f"mass matrix not positive definite: m_ll={self.m_ll}, "
                f"m_rr={self.m_rr}, m_lr={self.m_lr}")

    @property
    def det(self) -> float:
        return self.m_ll * self.m_rr - self.m_lr ** 2


@dataclass(frozen=True)
class CCPotential:
    """Potential decomposition at one configuration (all terms in E_0)."""

    u0: float
    u1: float
    u2: float
    u_s: float
    u_fl: float
    u_q: float
    v_int: float

    @property
    def total(self) -> float:
        return self.u_fl + self.u_q + self.v_int


# ---------------------------------------------------------------------------
# Shape functions of z = X/W with series guards at the removable singularity
# ---------------------------------------------------------------------------

_SERIES_Z = 1e-4


def _u_over_sinh(u: float) -> tuple[float, float]:
    """(u/sinh u, d/du of it); stable near u = 0."""
    if abs(u) < _SERIES_Z:
        return 1.0 - u * u / 6.0 + 7.0 * u ** 4 / 360.0, \
            -u / 3.0 + 7.0 * u ** 3 / 90.0
    if abs(u) > 350.0:            # u/sinh(u) underflows; avoid sinh overflow
        return 0.0, 0.0
    sh = math.sinh(u)
    return u / sh, (sh - u * math.cosh(u)) / sh ** 2


def _sech(z: float) -> float:
    e = math.exp(-abs(z))
    return 2.0 * e / (1.0 + e * e)


def mass_shape(z: float) -> tuple[float, float]:
    """(1 + 2z/sinh 2z) and its z-derivative."""
    val, dval = _u_over_sinh(2.0 * z)
    return 1.0 + val, 2.0 * dval


def interface_weight(x: float, width: float) -> tuple[float, float]:
    """g_I(X) = 4 sech(X/W)/W (lambda_J units) and dg_I/dX."""
    z = x / width
    s = _sech(z)
    g = 4.0 * s / width
    dg = -4.0 * s * math.tanh(z) / width ** 2
    return g, dg


def _u0_side(z: float, width: float) -> tuple[float, float]:
    """One-sided bare potential and its z-derivative (overflow-safe)."""
    val, dval = _u_over_sinh(2.0 * z)
    s = _sech(z)
    t = math.tanh(z)
    # tanh*sech^2*(2z + sinh 2z) rewritten via sech^2 sinh 2z = 2 tanh
    a = (4.0 / width) * (1.0 - val) + 2.0 * width * t * (2.0 * z * s * s + 2.0 * t)
    da = (-(4.0 / width) * 2.0 * dval
          + 2.0 * width * ((s * s - 2.0 * t * t) * (2.0 * z * s * s + 2.0 * t)
                           + 4.0 * t))
    return a, da


def _h1(z: float) -> tuple[float, float]:
    """8 sech^2 tanh^2 and its z-derivative."""
    s = _sech(z)
    t = math.tanh(z)
    return 8.0 * s * s * t * t, 16.0 * s * s * t * (s * s - t * t)


def _h2(z: float) -> tuple[float, float]:
    """4 sech tanh (1 - 2 sech^2) and its z-derivative."""
    s = _sech(z)
    t = math.tanh(z)
    val = 4.0 * s * t * (1.0 - 2.0 * s * s)
    dval = 4.0 * (s * (1.0 - 2.0 * s * s) * (s * s - t * t)
                  + 4.0 * s ** 3 * t * t)
    return val, dval


# ---------------------------------------------------------------------------
# Masses and potential
# ---------------------------------------------------------------------------

def masses(xl: float, xr: float, params: CircuitParams,
           width: float = 1.0) -> MassMatrix:
    """Coordinate-dependent mass matrix of (X_L, X_R)."""
    a = params.discreteness
    c_mass = (params.cj_term - 1.0 + params.cj_rail) * a
    c_cpl = params.cj_rail * a
    out = []
    for x in (xl, xr):
        shape, _ = mass_shape(x / width)
        g, _ = interface_weight(x, width)
        out.append(8.0 / width * shape + c_mass * g * g)
    g_l, _ = interface_weight(xl, width)
    g_r, _ = interface_weight(xr, width)
    return MassMatrix(m_ll=out[0], m_rr=out[1], m_lr=c_cpl * g_l * g_r)


def _mass_gradients(xl: float, xr: float, params: CircuitParams,
                    width: float) -> tuple[float, float, float, float]:
    """(dm_L/dX_L, dm_R/dX_R, dm_LR/dX_L, dm_LR/dX_R)."""
    a = params.discreteness
    c_mass = (params.cj_term - 1.0 + params.cj_rail) * a
    c_cpl = params.cj_rail * a
    g_l, dg_l = interface_weight(xl, width)
    g_r, dg_r = interface_weight(xr, width)
    _, dshape_l = mass_shape(xl / width)
    _, dshape_r = mass_shape(xr / width)
    dml = 8.0 / width ** 2 * dshape_l + 2.0 * c_mass * g_l * dg_l
    dmr = 8.0 / width ** 2 * dshape_r + 2.0 * c_mass * g_r * dg_r
    return dml, dmr, c_cpl * dg_l * g_r, c_cpl * g_l * dg_r


def potential(xl: float, xr: float, phi_q: float, params: CircuitParams,
              width: float = 1.0) -> CCPotential:
    """Decomposed dimensionless potential at one configuration."""
    a = params.discreteness
    sigma = params.sigma
    z_l, z_r = xl / width, xr / width

    u0 = _u0_side(z_l, width)[0] + _u0_side(z_r, width)[0]
    u1 = _h1(z_l)[0] + _h1(z_r)[0]
    u2 = -_h1(z_l)[0] * _h1(z_r)[0] + _h2(z_l)[0] * _h2(z_r)[0]
    dphi = (soliton.phi_left(xl, width, sigma)
            - soliton.phi_right(xr, width, sigma))
    u_s = 0.5 * (sigma * dphi + sigma * params.phi_ext) ** 2

    c1 = (params.ic_term - 1.0 + params.ic_rail) * a
    c2 = params.ic_rail * a
    elq = params.elq_over_e0
    u_fl = u0 + c1 * u1 + c2 * u2 + elq * u_s

    u_q = (params.ejq_over_e0 * (1.0 - math.cos(phi_q))
           + 0.5 * elq * (phi_q - params.phi_ext) ** 2)
    v_int = -elq * dphi * (phi_q - params.phi_ext)
    return CCPotential(u0=u0, u1=u1, u2=u2, u_s=u_s, u_fl=u_fl,
                       u_q=u_q, v_int=v_int)


def potential_gradient(xl: float, xr: float, phi_q: float,
                       params: CircuitParams,
                       width: float = 1.0) -> tuple[float, float, float]:
    """Analytic (dU/dX_L, dU/dX_R, dU/dphi_q) of the total potential."""
    a = params.discreteness
    sigma = params.sigma
    z_l, z_r = xl / width, xr / width
    c1 = (params.ic_term - 1.0 + params.ic_rail) * a
    c2 = params.ic_rail * a
    elq = params.elq_over_e0

    h1_l, dh1_l = _h1(z_l)
    h1_r, dh1_r = _h1(z_r)
    h2_l, dh2_l = _h2(z_l)
    h2_r, dh2_r = _h2(z_r)
    _, du0_l = _u0_side(z_l, width)
    _, du0_r = _u0_side(z_r, width)

    dphi = (soliton.phi_left(xl, width, sigma)
            - soliton.phi_right(xr, width, sigma))
    g_l, _ = interface_weight(xl, width)
    g_r, _ = interface_weight(xr, width)
    # d(phi_L)/dX_L = sigma g_I(X_L); d(phi_R)/dX_R = -sigma g_I(X_R)
    dphi_dxl = sigma * g_l
    dphi_dxr = sigma * g_r  # of (-phi_R); d(dphi)/dX_R = +sigma g_r

    common = elq * (dphi + params.phi_ext) - elq * (phi_q - params.phi_ext)
    du_dxl = (du0_l + c1 * dh1_l
              + c2 * (-dh1_l * h1_r + dh2_l * h2_r)) / width + common * dphi_dxl
    du_dxr = (du0_r + c1 * dh1_r
              + c2 * (-h1_l * dh1_r + h2_l * dh2_r)) / width + common * dphi_dxr
    du_dq = (params.ejq_over_e0 * math.sin(phi_q)
             + elq * (phi_q - params.phi_ext) - elq * dphi)
    return du_dxl, du_dxr, du_dq


def cc_eom_rhs(state: CCState, params: CircuitParams) -> tuple[float, float, float]:
    """Accelerations (X_L, X_R, phi_q) including the velocity-squared terms."""
    w = state.width
    mm = masses(state.xl, state.xr, params, w)
    if mm.det < 1e-12:
        raise NumericalError(f"singular mass matrix at state {state!r}")
    du_dxl, du_dxr, du_dq = potential_gradient(
        state.xl, state.xr, state.phi_q, params, w)
    dml, dmr, dmlr_dxl, dmlr_dxr = _mass_gradients(state.xl, state.xr, params, w)

    rhs_l = du_dxl + 0.5 * dml * state.vxl ** 2 + dmlr_dxr * state.vxr ** 2
    rhs_r = du_dxr + 0.5 * dmr * state.vxr ** 2 + dmlr_dxl * state.vxl ** 2
    axl = -(mm.m_rr * rhs_l - mm.m_lr * rhs_r) / mm.det
    axr = -(mm.m_ll * rhs_r - mm.m_lr * rhs_l) / mm.det
    aq = -du_dq / params.mq
    return axl, axr, aq


def cc_energy(state: CCState, params: CircuitParams) -> float:
    """Conserved energy: quadratic kinetic form plus total potential, in E_0."""
    mm = masses(state.xl, state.xr, params, state.width)
    kin = (0.5 * mm.m_ll * state.vxl ** 2 + 0.5 * mm.m_rr * state.vxr ** 2
           + mm.m_lr * state.vxl * state.vxr
           + 0.5 * params.mq * state.vphi_q ** 2)
    return kin + potential(state.xl, state.xr, state.phi_q, params,
                           state.width).total


# ---------------------------------------------------------------------------
# Time integration and channel classification
# ---------------------------------------------------------------------------

@dataclass
class CCTrajectory:
    times: np.ndarray
    xl: np.ndarray
    xr: np.ndarray
    phi_q: np.ndarray
    phi_b: np.ndarray             # interface phase difference of the ansatz
    energy: np.ndarray
    final_state: CCState
    outcome: ScatterOutcome = field(default=None)  # filled by run_cc


def initial_cc_state(params: CircuitParams, v_over_c: float,
                     x0: float = -10.0, qubit_init: float | int = 0) -> CCState:
    """Incoming fluxon at x0 with the interface coordinate at rest."""
    if x0 > -5.0:
        raise ValidationError(f"initial xl must be <= -5, got {x0}")
    if isinstance(qubit_init, (int, np.integer)) and not isinstance(qubit_init, bool):
        phi_q = quantum1d.initial_phase(params, int(qubit_init))
    else:
        phi_q = float(qubit_init)
    return CCState(xl=x0, xr=0.0, phi_q=phi_q, vxl=abs(v_over_c), vxr=0.0,
                   vphi_q=0.0, width=fluxon_width(v_over_c))


def _rk4_step(y: list, params: CircuitParams, width: float, dt: float) -> list:
    def deriv(s):
        st = CCState(s[0], s[1], s[4], s[2], s[3], s[5], width)
        axl, axr, aq = cc_eom_rhs(st, params)
        return [s[2], s[3], axl, axr, s[5], aq]

    k1 = deriv(y)
    k2 = deriv([a + 0.5 * dt * b for a, b in zip(y, k1)])
    k3 = deriv([a + 0.5 * dt * b for a, b in zip(y, k2)])
    k4 = deriv([a + dt * b for a, b in zip(y, k3)])
    return [a + dt / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4)
            for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4)]


def run_cc(initial: CCState, params: CircuitParams,
           t_end: float = DEFAULT_T_END, dt: float = DEFAULT_DT,
           sample_stride: int = 20, fj_ghz: float | None = None) -> CCTrajectory:
    """Fixed-step RK4 trajectory with asymptotic channel classification."""
    if initial.xl > -5.0 or abs(initial.xr) > 1e-9:
        raise ValidationError("run_cc expects initial xl <= -5 and xr = 0")
    w = initial.width
    y = [initial.xl, initial.xr, initial.vxl, initial.vxr,
         initial.phi_q, initial.vphi_q]
    t = initial.t
    n_steps = int(round((t_end - t) / dt))

    times, xls, xrs, qs, bs, es = [], [], [], [], [], []
    sigma = params.sigma

    def record() -> None:
        st = CCState(y[0], y[1], y[4], y[2], y[3], y[5], w, t)
        times.append(t)
        xls.append(y[0])
        xrs.append(y[1])
        qs.append(y[4])
        bs.append(soliton.phi_left(y[0], w, sigma)
                  - soliton.phi_right(y[1], w, sigma))
        es.append(cc_energy(st, params))

    record()
    arrived = False
    exit_after = 0.0
    for step in range(n_steps):
        y = _rk4_step(y, params, w, dt)
        t += dt
        if (step + 1) % sample_stride == 0 or step == n_steps - 1:
            if not all(math.isfinite(v) for v in y):
                raise NumericalError(f"non-finite CC state at t={t:.3f}")
            record()
            arrived = arrived or abs(y[0]) < 3.0
            if arrived and (abs(y[0]) > EXIT_RADIUS + 2.0
                            or abs(y[1]) > EXIT_RADIUS + 2.0):
                exit_after += dt * sample_stride
                if exit_after > 3.0:  # short tail past the exit, then stop
                    break

    final = CCState(y[0], y[1], y[4], y[2], y[3], y[5], w, t)
    traj = CCTrajectory(times=np.array(times), xl=np.array(xls),
                        xr=np.array(xrs), phi_q=np.array(qs),
                        phi_b=np.array(bs), energy=np.array(es),
                        final_state=final)
    traj.outcome = classify_cc(traj, params, fj_ghz=fj_ghz)
    return traj


def classify_cc(traj: CCTrajectory, params: CircuitParams,
                fj_ghz: float | None = None) -> ScatterOutcome:
    """Channel/bounce/retention summary of a CC trajectory."""
    channel, exit_idx, exit_side = soliton.channel_from_tracks(
        traj.xl, traj.xr, exit_radius=EXIT_RADIUS)
    # phi_b of the ansatz winds by -2pi on transmission; measure activity
    # relative to the incoming-vacuum value 0 modulo 2pi.
    wrapped = np.abs((traj.phi_b + math.pi) % (2.0 * math.pi) - math.pi)
    dt_sample = float(traj.times[1] - traj.times[0]) if len(traj.times) > 1 else 0.0
    active = float(np.sum(wrapped > ACTIVITY_THRESHOLD)) * dt_sample
    periods = active / (2.0 * math.pi)
    bounce = count_bounces(traj.times, wrapped)
    max_phi_b = float(wrapped.max())

    if channel is None:
        late = slice(int(0.75 * len(traj.times)), None)
        trapped = (np.max(np.abs(traj.xl[late])) < 3.0
                   and np.max(np.abs(traj.xr[late])) < 3.0)
        return ScatterOutcome(channel="Trapped" if trapped else "Undecided",
                              bounce_count=bounce, max_phi_b=max_phi_b,
                              energy_retention=float("nan"),
                              measurement_time=periods,
                              measurement_time_ns=_to_ns(periods, fj_ghz))

    coord = traj.xl if exit_side == "left" else traj.xr
    sel = slice(exit_idx, min(exit_idx + 50, len(traj.times)))
    v_out = soliton.outgoing_velocity(traj.times[sel], coord[sel])
    v_in = math.hypot(traj.xl[1] - traj.xl[0], traj.xr[1] - traj.xr[0]) / dt_sample \
        if dt_sample else float("nan")
    retention = soliton.energy_retention_from_velocities(v_in, v_out)
    return ScatterOutcome(channel=channel, bounce_count=bounce,
                          max_phi_b=max_phi_b, energy_retention=retention,
                          measurement_time=periods,
                          measurement_time_ns=_to_ns(periods, fj_ghz))


# ---------------------------------------------------------------------------
# Potential-grid export
# ---------------------------------------------------------------------------

@dataclass
class PotentialGrid:
    xl_axis: np.ndarray
    xr_axis: np.ndarray
    values: np.ndarray            # shape (len(xl_axis), len(xr_axis)), row-major
    phi_q: float
    e_init: float
    width: float


def potential_grid(params: CircuitParams, phi_q: float,
                   bounds: tuple[float, float] = (-8.0, 8.0),
                   resolution: int = 161, width: float = 1.0,
                   v_over_c: float = 0.6) -> PotentialGrid:
    """Total CC potential on a square (X_L, X_R) grid plus the E_init level."""
    if resolution < 2:
        raise ValidationError(f"resolution must be >= 2, got {resolution}")
    axis = np.linspace(bounds[0], bounds[1], resolution)
    vals = np.empty((resolution, resolution))
    for i, xl in enumerate(axis):
        for j, xr in enumerate(axis):
            vals[i, j] = potential(xl, xr, phi_q, params, width).total
    e_init = fluxon_energy(v_over_c) + potential(
        -1e3, 0.0, phi_q, params, width).u_q
    return PotentialGrid(xl_axis=axis, xr_axis=axis.copy(), values=vals,
                         phi_q=phi_q, e_init=e_init, width=width)


def trajectory_to_csv(traj: CCTrajectory, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "xl", "xr", "phi_q", "phi_b", "energy"])
        for row in zip(traj.times, traj.xl, traj.xr, traj.phi_q,
                       traj.phi_b, traj.energy):
            writer.writerow([f"{v:.9g}" for v in row])


def grid_to_csv(grid: PotentialGrid, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "value"])
        for i, xl in enumerate(grid.xl_axis):
            for j, xr in enumerate(grid.xr_axis):
                writer.writerow([f"{xl:.9g}", f"{xr:.9g}",
                                 f"{grid.values[i, j]:.9g}"])
