"""Circuit parameters, derived scales, fabrication mapping and coherence checks.

All simulation quantities are dimensionless, scaled by the characteristic
parameters (L, I_c, C_J) of the long-Josephson-junction (LJJ) arrays:
lengths in units of the penetration depth lambda_J, times in 1/omega_J,
velocities in units of the Swihart velocity c = lambda_J * omega_J, and
energies in units of E_0 = I_c * Phi_0 * lambda_J / (2 pi a), where a is the
cell length.  The single-JJ Josephson energy is E_J = E_0 * a / lambda_J.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

from scipy.constants import e as _E_CHARGE, hbar as _HBAR, h as _H_PLANCK

from .errors import ValidationError

PHI0 = _H_PLANCK / (2.0 * _E_CHARGE)  # flux quantum, Wb

#: How reported times relate to physical time: nu_J = omega_J / (2 pi), so a
#: time axis value "nu_J * t = 1" is one Josephson period 2 pi / omega_J.
NU_J_CONVENTION = "nu_J = omega_J / (2*pi); nu_J*t = (omega_J*t) / (2*pi)"


@dataclass(frozen=True)
class CircuitParams:
    """Dimensionless ratios defining the LJJs, interface cell and fluxonium.

    All JJ ratios are relative to the LJJ cell values (I_c, C_J, L).
    """

    discreteness: float          # a / lambda_J
    beta2: float                 # quantum-fluctuation parameter beta^2
    ic_term: float               # termination JJ, Ihat_c / I_c
    cj_term: float               # termination JJ, Chat_J / C_J
    ic_rail: float               # rail JJ, I_c^B / I_c
    cj_rail: float               # rail JJ, C_J^B / C_J
    ic_q: float                  # qubit JJ, I_c^q / I_c
    cj_q: float                  # qubit JJ, C_J^q / C_J
    lq: float                    # superinductance, L_q / L
    phi_ext: float               # external flux bias (radians)
    sigma: int = 1               # fluxon polarity, +1 or -1
    n_cells: int = 120           # JJs per LJJ side (incl. termination JJ)

    def __post_init__(self) -> None:
        positive = {
            "ic_term": self.ic_term, "cj_term": self.cj_term,
            "ic_rail": self.ic_rail, "cj_rail": self.cj_rail,
            "ic_q": self.ic_q, "cj_q": self.cj_q, "lq": self.lq,
        }
        for name, value in positive.items():
            if not value > 0.0:
                raise ValidationError(f"{name} must be strictly positive, got {value}")
        if not 0.0 < self.discreteness < 1.0:
            raise ValidationError(
                f"discreteness a/lambda_J must lie in (0, 1), got {self.discreteness}")
        if not 0.0 < self.beta2 < 8.0 * math.pi:
            raise ValidationError(
                f"beta2 must lie in (0, 8*pi) for soliton stability, got {self.beta2}")
        if self.sigma not in (+1, -1):
            raise ValidationError(f"sigma must be +1 or -1, got {self.sigma}")
        if self.n_cells < 8:
            raise ValidationError(f"n_cells too small: {self.n_cells}")

    # -- frequently used derived ratios -------------------------------------

    @property
    def lam(self) -> float:
        """lambda_J / a."""
        return 1.0 / self.discreteness

    @property
    def ejq_over_e0(self) -> float:
        """E_J^q / E_0 = (I_c^q/I_c) * a/lambda_J."""
        return self.ic_q * self.discreteness

    @property
    def ecq_over_e0(self) -> float:
        """E_c^q / E_0 = beta^4 * (C_J/C_J^q) * lambda_J / (8 a)."""
        return self.beta2 ** 2 * self.lam / (8.0 * self.cj_q)

    @property
    def elq_over_e0(self) -> float:
        """E_L^q / E_0 = (L/L_q) * lambda_J / a."""
        return self.lam / self.lq

    @property
    def mq(self) -> float:
        """Dimensionless fluxonium mass M_q = (C_J^q/C_J) * a/lambda_J."""
        return self.cj_q * self.discreteness

    def replace(self, **kwargs) -> "CircuitParams":
        data = asdict(self)
        data.update(kwargs)
        return CircuitParams(**data)


#: Standard-fluxonium readout case (main-text parameter set).
CASE_A = CircuitParams(
    discreteness=1.0 / math.sqrt(7.0),
    beta2=0.4,
    ic_term=1.3, cj_term=2.3,
    ic_rail=5.9, cj_rail=11.0,
    ic_q=0.98, cj_q=0.74, lq=233.0,
    phi_ext=0.2 * math.pi,
)

#: Heavy-fluxonium readout case (appendix parameter set).
CASE_B = CircuitParams(
    discreteness=1.0 / math.sqrt(7.0),
    beta2=0.4,
    ic_term=2.0, cj_term=0.75,
    ic_rail=6.7, cj_rail=11.5,
    ic_q=6.0, cj_q=0.6, lq=40.0,
    phi_ext=1.2 * math.pi,
)

#: Unsuitable-readout preset near the half-flux point.
CASE_HALF_FLUX = CASE_A.replace(phi_ext=0.8 * math.pi)


@dataclass(frozen=True)
class DerivedScales:
    lambda_over_a: float
    w_over_lambda: float         # fluxon width at the given velocity
    mq: float
    ej_q: float                  # E_J^q / E_0
    ec_q: float                  # E_c^q / E_0
    el_q: float                  # E_L^q / E_0
    omega_ratio_rail: float      # omega_J^B / omega_J
    omega_ratio_q: float         # omega_J^q / omega_J
    nu_j_interpretation: str = NU_J_CONVENTION


def fluxon_width(v_over_c: float) -> float:
    """Lorentz-contracted fluxon width W / lambda_J at velocity v/c."""
    if not abs(v_over_c) < 1.0:
        raise ValidationError(
            f"|v/c| must be below the Swihart velocity, got {v_over_c}")
    return math.sqrt(1.0 - v_over_c ** 2)


def fluxon_energy(v_over_c: float) -> float:
    """Total fluxon energy 8/sqrt(1 - (v/c)^2) in units of E_0."""
    return 8.0 / fluxon_width(v_over_c)


def derive_scales(params: CircuitParams, v_over_c: float) -> DerivedScales:
    """Populate all ratio-valued derived scales for a given fluxon velocity."""
    return DerivedScales(
        lambda_over_a=params.lam,
        w_over_lambda=fluxon_width(v_over_c),
        mq=params.mq,
        ej_q=params.ejq_over_e0,
        ec_q=params.ecq_over_e0,
        el_q=params.elq_over_e0,
        omega_ratio_rail=math.sqrt(params.ic_rail / params.cj_rail),
        omega_ratio_q=math.sqrt(params.ic_q / params.cj_q),
    )


# ---------------------------------------------------------------------------
# Fabrication mapping (physical characteristics from a chosen process)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FabricationInputs:
    """Process inputs: critical current density and capacitance per area."""

    jc: float                    # uA / um^2
    cj_area: float               # fF / um^2
    case: str                    # "A" (shunted LJJ JJs) or "B" (dense qubit JJ)
    jcq_ratio: float = 1.0       # j_c^q / j_c, used by case B only

    def __post_init__(self) -> None:
        if self.jc <= 0.0 or self.cj_area <= 0.0:
            raise ValidationError("jc and cj_area must be positive")
        if self.case not in ("A", "B"):
            raise ValidationError(f"case must be 'A' or 'B', got {self.case!r}")
        if self.jcq_ratio < 1.0:
            raise ValidationError("jcq_ratio must be >= 1")


@dataclass(frozen=True)
class PhysicalCharacteristics:
    """Physical LJJ and fluxonium characteristics for one fabrication case."""

    area: float                  # JJ area, um^2
    ic: float                    # critical current, uA
    csh_ratio: float             # C_sh / C_J^bare
    cj: float                    # total JJ capacitance, fF
    l: float                     # cell inductance, nH
    fj: float                    # omega_J / 2pi, GHz
    e0_h: float                  # E_0 / h, GHz
    ejq_h: float                 # E_J^q / h, GHz
    ecq_h: float                 # E_c^q / h, GHz
    elq_h: float                 # E_L^q / h, GHz
    f01: float                   # omega_01 / 2pi at the operating bias, GHz
    f01_min: float               # omega_01 / 2pi at half flux, MHz
    jcq_ratio: float             # j_c^q / j_c

    #: Table-I column order used by the CSV export.
    CSV_COLUMNS = ("area_um2", "ic_uA", "csh_ratio", "cj_fF", "l_nH",
                   "fj_GHz", "e0_h_GHz", "jcq_ratio", "ejq_h_GHz",
                   "ecq_h_GHz", "elq_h_GHz", "f01_GHz", "f01_min_MHz")

    def csv_row(self) -> list[float]:
        return [self.area, self.ic, self.csh_ratio, self.cj, self.l,
                self.fj, self.e0_h, self.jcq_ratio, self.ejq_h,
                self.ecq_h, self.elq_h, self.f01, self.f01_min]

    def as_dict(self) -> dict:
        return dict(zip(self.CSV_COLUMNS, self.csv_row()))


def fabricate(inputs: FabricationInputs, params: CircuitParams) -> PhysicalCharacteristics:
    """Map a fabrication process onto physical circuit characteristics.

    Case A assumes the qubit JJ shares the process critical-current density
    and the LJJ JJs carry shunt capacitors; case B assumes unshunted LJJ JJs
    and a denser qubit JJ.  The JJ area follows from requiring consistency
    with the dimensionless (L_J/L, beta^2) design values.
    """
    jc_si = inputs.jc * 1e-6 / 1e-12          # A / m^2
    cj_si = inputs.cj_area * 1e-15 / 1e-12    # F / m^2
    lj_over_l = params.lam ** 2
    beta4 = params.beta2 ** 2
    freq_sq = params.ic_q / params.cj_q       # (omega_J^q / omega_J)^2

    if inputs.case == "A":
        if freq_sq < 1.0:
            raise ValidationError(
                "case A requires ic_q/cj_q >= 1 (non-negative shunt capacitance)")
        area_sq = (8.0 * _E_CHARGE ** 3 / _HBAR) / (
            jc_si * cj_si * lj_over_l * beta4 * freq_sq)
        csh_ratio = freq_sq - 1.0
        jcq_ratio = 1.0
    else:
        if not math.isclose(inputs.jcq_ratio, freq_sq, rel_tol=0.15):
            raise ValidationError(
                f"case B requires jcq_ratio = ic_q/cj_q = {freq_sq:.3g}, "
                f"got {inputs.jcq_ratio}")
        area_sq = (8.0 * _E_CHARGE ** 3 / _HBAR) / (
            jc_si * cj_si * lj_over_l * beta4)
        csh_ratio = 0.0
        jcq_ratio = freq_sq

    area_m2 = math.sqrt(area_sq)
    ic_si = jc_si * area_m2
    cj_total_si = cj_si * area_m2 * (1.0 + csh_ratio)
    # beta^2 = (4 e^2 / hbar) sqrt(L / C_J)
    plasma_impedance = params.beta2 * _HBAR / (4.0 * _E_CHARGE ** 2)
    l_si = cj_total_si * plasma_impedance ** 2
    omega_j = math.sqrt(2.0 * math.pi * ic_si / (PHI0 * cj_total_si))
    ej_si = ic_si * PHI0 / (2.0 * math.pi)
    e0_si = ej_si * params.lam

    ejq_h = params.ejq_over_e0 * e0_si / _H_PLANCK
    ecq_h = params.ecq_over_e0 * e0_si / _H_PLANCK
    elq_h = params.elq_over_e0 * e0_si / _H_PLANCK

    # Fluxonium frequencies from the 1D spectral solver (avoids duplicating
    # spectral code here).
    from . import quantum1d

    f01_e0 = quantum1d.transition_energy(params)
    f01_min_e0 = quantum1d.transition_energy(
        params.replace(phi_ext=math.pi), n_grid=4096)

    return PhysicalCharacteristics(
        area=area_m2 * 1e12,
        ic=ic_si * 1e6,
        csh_ratio=csh_ratio,
        cj=cj_total_si * 1e15,
        l=l_si * 1e9,
        fj=omega_j / (2.0 * math.pi) * 1e-9,
        e0_h=e0_si / _H_PLANCK * 1e-9,
        ejq_h=ejq_h * 1e-9,
        ecq_h=ecq_h * 1e-9,
        elq_h=elq_h * 1e-9,
        f01=f01_e0 * e0_si / _H_PLANCK * 1e-9,
        f01_min=f01_min_e0 * e0_si / _H_PLANCK * 1e-6,
        jcq_ratio=jcq_ratio,
    )


# ---------------------------------------------------------------------------
# Quantum-coherence constraint checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoherenceReport:
    k_lambda: float              # fluxon wave vector k * lambda_J
    de_broglie: float            # lambda_dB / lambda_J
    xi_lower_bound: float        # minimum packet width xi/a (momentum spread)
    xi_lower_bound_delay: float  # tighter time-delay-mode bound on xi/a
    v_max_discreteness: float    # velocity bound from lambda_dB > a
    v_max_plasma: float          # plasma-wave suppression bound
    kinetic_energy: float        # fluxon kinetic energy in units of hbar*omega_J
    passes: dict = field(default_factory=dict)


def coherence_checks(params: CircuitParams, v_over_c: float,
                     xi_over_a: float, l_over_a: float) -> CoherenceReport:
    """Evaluate the particle-like-fluxon constraints for a wave packet.

    ``xi_over_a`` is the assumed packet width and ``l_over_a`` the LJJ length
    entering the time-delay lower bound.
    """
    if not 0.0 < v_over_c < 1.0:
        raise ValidationError(f"v/c must lie in (0, 1), got {v_over_c}")
    beta2 = params.beta2
    lam = params.lam

    k_lambda = 8.0 * v_over_c / beta2
    de_broglie = 2.0 * math.pi / k_lambda
    xi_bound = beta2 * lam / (8.0 * v_over_c)
    xi_bound_delay = math.sqrt(beta2 * l_over_a * lam / 8.0)
    v_max_disc = 2.0 * math.pi * beta2 * lam / 8.0
    v_max_plasma = math.sqrt(1.0 - (1.0 + beta2 / 8.0) ** -2)
    kinetic = (fluxon_energy(v_over_c) - 8.0) / beta2  # hbar*omega_J = beta^2 E_0

    passes = {
        "packet_width": xi_over_a > xi_bound,
        "packet_width_time_delay": xi_over_a > xi_bound_delay,
        "de_broglie": de_broglie * lam > 1.0,  # lambda_dB > a
        "velocity_discreteness": v_over_c < min(v_max_disc, 1.0),
        "velocity_plasma": v_over_c < v_max_plasma,
    }
    return CoherenceReport(
        k_lambda=k_lambda,
        de_broglie=de_broglie,
        xi_lower_bound=xi_bound,
        xi_lower_bound_delay=xi_bound_delay,
        v_max_discreteness=v_max_disc,
        v_max_plasma=v_max_plasma,
        kinetic_energy=kinetic,
        passes=passes,
    )


# ---------------------------------------------------------------------------
# Key-value configuration ingestion
# ---------------------------------------------------------------------------

#: Mapping from configuration keys to CircuitParams fields.  phi_ext is
#: ingested in units of pi for hand-editing convenience.
CONFIG_KEYS = {
    "discreteness": "discreteness",
    "beta2": "beta2",
    "ic_term_ratio": "ic_term",
    "cj_term_ratio": "cj_term",
    "ic_rail_ratio": "ic_rail",
    "cj_rail_ratio": "cj_rail",
    "ic_q_ratio": "ic_q",
    "cj_q_ratio": "cj_q",
    "lq_ratio": "lq",
    "phi_ext_over_pi": "phi_ext",
    "sigma": "sigma",
    "n_cells": "n_cells",
}


def params_from_mapping(mapping: dict, base: CircuitParams | None = None) -> CircuitParams:
    """Build CircuitParams from flat config keys, overriding ``base``."""
    base = base if base is not None else CASE_A
    overrides: dict = {}
    for key, raw in mapping.items():
        if key not in CONFIG_KEYS:
            raise ValidationError(f"unknown parameter key: {key!r}")
        fld = CONFIG_KEYS[key]
        if fld == "phi_ext":
            overrides[fld] = float(raw) * math.pi
        elif fld in ("sigma", "n_cells"):
            overrides[fld] = int(raw)
        else:
            overrides[fld] = float(raw)
    return base.replace(**overrides)
