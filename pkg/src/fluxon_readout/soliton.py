"""Sine-Gordon soliton profiles, the two-sided mirror ansatz, and fits.

The ansatz represents each LJJ field as a fluxon plus its mirror antifluxon,
parametrized by a single center coordinate per side (X_L for x<0, X_R for
x>0, both in units of lambda_J).  The interface values of the ansatz define
the termination phases phi_L(X_L), phi_R(X_R) used by the collective
coordinate model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .params import CircuitParams, fluxon_width, fluxon_energy


@dataclass(frozen=True)
class SolitonSpec:
    """A single fluxon: polarity, center, width and velocity (lambda_J, c units)."""

    sigma: int
    center: float
    width: float
    velocity: float

    def __post_init__(self) -> None:
        if self.sigma not in (+1, -1):
            raise ValidationError(f"sigma must be +1 or -1, got {self.sigma}")
        if not abs(self.velocity) < 1.0:
            raise ValidationError(f"|v/c| must be < 1, got {self.velocity}")
        if not math.isclose(self.width, fluxon_width(self.velocity), rel_tol=1e-9):
            raise ValidationError(
                f"width {self.width} inconsistent with velocity {self.velocity}")

    @classmethod
    def moving(cls, v_over_c: float, center: float = 0.0, sigma: int = 1) -> "SolitonSpec":
        return cls(sigma=sigma, center=center, width=fluxon_width(v_over_c),
                   velocity=v_over_c)


def soliton_profile(x, sigma: int, center: float, width: float):
    """Phase profile 4*arctan(exp(-sigma*(x - X)/W)); x in lambda_J units."""
    return 4.0 * np.arctan(np.exp(-sigma * (np.asarray(x, float) - center) / width))


def soliton_slope(x, sigma: int, center: float, width: float):
    """d(profile)/dx = -(2*sigma/W) * sech((x - X)/W)."""
    z = (np.asarray(x, float) - center) / width
    return -(2.0 * sigma / width) / np.cosh(z)


def ansatz_field(x, xl: float, xr: float, width: float, side: str, sigma: int = 1):
    """Fluxon-plus-mirror-antifluxon field on one LJJ side.

    side="left" (x<0): profile(sigma, X_L) + profile(-sigma, -X_L) - 2pi(1-sigma)
    side="right" (x>0): profile(-sigma, X_R) + profile(sigma, -X_R) - 2pi
    """
    if side == "left":
        return (soliton_profile(x, sigma, xl, width)
                + soliton_profile(x, -sigma, -xl, width)
                - 2.0 * math.pi * (1 - sigma))
    if side == "right":
        return (soliton_profile(x, -sigma, xr, width)
                + soliton_profile(x, sigma, -xr, width)
                - 2.0 * math.pi)
    raise ValidationError(f"side must be 'left' or 'right', got {side!r}")


# -- interface values of the ansatz and their derivatives --------------------
#
# At x=0 both mirror terms coincide:
#   phi_L(X_L) = 8*arctan(exp(+sigma*X_L/W)) - 2pi(1-sigma)
#   phi_R(X_R) = 8*arctan(exp(-sigma*X_R/W)) - 2pi
# with slopes +/- g_I(X)/lambda_J where g_I = 4 (lambda_J/W) sech(X/W).

def phi_left(xl: float, width: float, sigma: int = 1) -> float:
    return 8.0 * math.atan(math.exp(sigma * xl / width)) - 2.0 * math.pi * (1 - sigma)


def phi_right(xr: float, width: float, sigma: int = 1) -> float:
    return 8.0 * math.atan(math.exp(-sigma * xr / width)) - 2.0 * math.pi


def dphi_left(xl: float, width: float, sigma: int = 1) -> float:
    """d(phi_L)/d(X_L) = sigma * (4/W) sech(X_L/W)."""
    return sigma * (4.0 / width) / math.cosh(xl / width)


def dphi_right(xr: float, width: float, sigma: int = 1) -> float:
    """d(phi_R)/d(X_R) = -sigma * (4/W) sech(X_R/W)."""
    return -sigma * (4.0 / width) / math.cosh(xr / width)


# ---------------------------------------------------------------------------
# Least-squares fit of lattice phases to the ansatz
# ---------------------------------------------------------------------------

FIT_DOMAIN = 8.0          # |X| <= FIT_DOMAIN lambda_J
RESIDUAL_FLAG = 0.5       # rad; above this the fit is low-confidence


@dataclass(frozen=True)
class CCFit:
    xl: float
    xr: float
    residual: float           # combined RMS phase misfit (radians)
    residual_left: float
    residual_right: float

    @property
    def low_confidence(self) -> bool:
        return self.residual > RESIDUAL_FLAG


def _fit_side(phases: np.ndarray, x: np.ndarray, width: float, side: str,
              sigma: int) -> tuple[float, float]:
    """Scan-and-refine 1D least-squares fit of one side's center coordinate."""

    def rms(center: float) -> float:
        model = ansatz_field(x, center, center, width, side, sigma)
        return float(np.sqrt(np.mean((phases - model) ** 2)))

    candidates = np.linspace(-FIT_DOMAIN, FIT_DOMAIN, 161)
    errs = np.array([rms(c) for c in candidates])
    # Tie-break toward smaller |X| among near-degenerate minima.
    best = errs.min()
    close = np.flatnonzero(errs <= best + 1e-12)
    i0 = close[np.argmin(np.abs(candidates[close]))]
    lo = candidates[max(int(i0) - 1, 0)]
    hi = candidates[min(int(i0) + 1, len(candidates) - 1)]
    # Golden-section refinement.
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = rms(c), rms(d)
    while b - a > 1e-6:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = rms(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = rms(d)
    center = 0.5 * (a + b)
    return center, rms(center)


def fit_cc(phi_left_arr: np.ndarray, phi_right_arr: np.ndarray,
           params: CircuitParams, width: float) -> CCFit:
    """Fit lattice phases of both sides to the mirror ansatz.

    ``phi_left_arr``/``phi_right_arr`` hold JJ phases ordered from the
    interface outward (index 0 is the termination JJ).  The width is held at
    its adiabatic (initial-velocity) value.
    """
    a = params.discreteness
    n_l = len(phi_left_arr)
    n_r = len(phi_right_arr)
    x_l = -(np.arange(n_l) + 0.5) * a
    x_r = +(np.arange(n_r) + 0.5) * a
    xl, res_l = _fit_side(np.asarray(phi_left_arr, float), x_l, width, "left",
                          params.sigma)
    xr, res_r = _fit_side(np.asarray(phi_right_arr, float), x_r, width, "right",
                          params.sigma)
    residual = math.sqrt((n_l * res_l ** 2 + n_r * res_r ** 2) / (n_l + n_r))
    return CCFit(xl=xl, xr=xr, residual=residual,
                 residual_left=res_l, residual_right=res_r)


def channel_from_tracks(xl: np.ndarray, xr: np.ndarray,
                        exit_radius: float = 5.0,
                        arrival_radius: float = 3.0):
    """Scattering channel from collective-coordinate tracks.

    Exits count only after the incoming fluxon has reached the interface
    (|X_L| < arrival_radius) and only while moving outward, so the incoming
    leg of the trajectory is never misread as a reflection.  Channel names
    are relative to the incoming polarity ("Fluxon" = same polarity).
    Returns (channel or None, exit index, side).
    """
    n = len(xl)
    arrived = None
    for i in range(n):
        if abs(xl[i]) < arrival_radius:
            arrived = i
            break
    if arrived is None:
        return None, None, None
    for i in range(arrived + 1, n):
        for coord, side in ((xl, "left"), (xr, "right")):
            if abs(coord[i]) > exit_radius and abs(coord[i]) >= abs(coord[i - 1]):
                if side == "left":
                    name = "ReflectedFluxon" if coord[i] < 0 else "ReflectedAntifluxon"
                else:
                    name = "TransmittedFluxon" if coord[i] < 0 else "TransmittedAntifluxon"
                return name, i, side
    return None, None, None


def outgoing_velocity(times: np.ndarray, coords: np.ndarray) -> float:
    """Late-time velocity magnitude from a linear fit of a fitted coordinate."""
    if len(times) < 4:
        raise ValidationError("need at least 4 samples for a velocity fit")
    slope = np.polyfit(times, coords, 1)[0]
    return float(abs(slope))


def energy_retention_from_velocities(v_in: float, v_out: float) -> float:
    """E_out/E_in for elastic fluxon energies 8 E_0 / sqrt(1 - v^2)."""
    v_out = min(abs(v_out), 1.0 - 1e-12)
    return fluxon_energy(v_out) / fluxon_energy(abs(v_in))
