"""Fluxon-based transmission readout of a fluxonium qubit.

Simulation toolkit for a single fluxon scattering at the interface of two
discrete long Josephson junction arrays coupled to a fluxonium: full-circuit
classical dynamics, a collective-coordinate reduction, driven-qubit
backaction, mixed quantum-classical propagation, steady-state analysis, and
fabrication-parameter mapping.
"""

from . import (boundstate, ccmodel, lattice, mqc, params, quantum1d,
               soliton)
from .errors import NumericalError, ValidationError
from .params import (CASE_A, CASE_B, CASE_HALF_FLUX, CircuitParams,
                     FabricationInputs, coherence_checks, fabricate,
                     fluxon_energy, fluxon_width, params_from_mapping)

__all__ = [
    "CASE_A", "CASE_B", "CASE_HALF_FLUX", "CircuitParams",
    "FabricationInputs", "NumericalError", "ValidationError",
    "boundstate", "ccmodel", "coherence_checks", "fabricate",
    "fluxon_energy", "fluxon_width", "lattice", "mqc", "params",
    "params_from_mapping", "quantum1d", "soliton",
]

__version__ = "0.1.0"
