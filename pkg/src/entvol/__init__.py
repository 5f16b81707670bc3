"""Entanglement-volume dynamics of excitation-conserving qubit systems."""

from .entanglement import (
    Case,
    VolumeSample,
    concurrence,
    entanglement_volume,
    fast_volume,
    one_to_other_weight,
    single_qubit_purity,
)
from .errors import BracketError, DegenerateInputError, DomainError, EntvolError, ResourceError
from .freezing import (
    EvolutionTrace,
    FreezeInterval,
    FreezeReport,
    OpenDetectorConfig,
    PhaseDiagramGrid,
    case_condition,
    critical_theta,
    detect_freezing_conditional,
    detect_freezing_value,
    phase_diagram,
    predicted_frozen_values,
)
from .open_dynamics import OpenSystemParams, ccrr_state, damping_amplitudes, evolve_open
from .oracle import cross_check, full_evolve, full_hamiltonian
from .sector_state import (
    FullState,
    SectorBasis,
    TwoBranchState,
    embed_full,
    enumerate_sector,
    make_two_branch,
    project_two_branch,
    qubit_excitation_weight,
)
from .xx_dynamics import (
    XXModel,
    evolve,
    evolve_trace,
    sector_hamiltonian,
    single_excitation_propagator,
    time_grid,
)

__version__ = "0.1.0"

__all__ = [
    "BracketError",
    "Case",
    "DegenerateInputError",
    "DomainError",
    "EntvolError",
    "EvolutionTrace",
    "FreezeInterval",
    "FreezeReport",
    "FullState",
    "OpenDetectorConfig",
    "OpenSystemParams",
    "PhaseDiagramGrid",
    "ResourceError",
    "SectorBasis",
    "TwoBranchState",
    "VolumeSample",
    "XXModel",
    "case_condition",
    "ccrr_state",
    "concurrence",
    "critical_theta",
    "cross_check",
    "damping_amplitudes",
    "detect_freezing_conditional",
    "detect_freezing_value",
    "embed_full",
    "entanglement_volume",
    "enumerate_sector",
    "evolve",
    "evolve_open",
    "evolve_trace",
    "fast_volume",
    "full_evolve",
    "full_hamiltonian",
    "make_two_branch",
    "one_to_other_weight",
    "phase_diagram",
    "predicted_frozen_values",
    "project_two_branch",
    "qubit_excitation_weight",
    "sector_hamiltonian",
    "single_excitation_propagator",
    "single_qubit_purity",
    "time_grid",
]
