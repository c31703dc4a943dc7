"""Continuous frequency-domain quantum walks of biphoton frequency combs."""

from .analysis import (
    Confinement,
    SweepTable,
    TransferDistribution,
    confinement_metrics,
    moments,
    poisson_sample,
    single_photon_transfer,
    sweep_depth,
    sweep_dimension,
    transfer_distribution,
)
from .bessel import BesselRow, bessel_j, bessel_row, truncation_order
from .state import BfcState, SpectralPhaseProfile, eval_phase, make_maximal_state
from .walk import (
    ConfigurationError,
    JsiMatrix,
    ModulatorConfig,
    biphoton_jsi,
    fermionic_antidiagonal_closed_form,
    incoherent_jsi,
    single_photon_distribution,
    symmetrized_display,
)

__version__ = "0.1.0"

__all__ = [
    "BesselRow",
    "BfcState",
    "Confinement",
    "ConfigurationError",
    "JsiMatrix",
    "ModulatorConfig",
    "SpectralPhaseProfile",
    "SweepTable",
    "TransferDistribution",
    "bessel_j",
    "bessel_row",
    "biphoton_jsi",
    "confinement_metrics",
    "eval_phase",
    "fermionic_antidiagonal_closed_form",
    "incoherent_jsi",
    "make_maximal_state",
    "moments",
    "poisson_sample",
    "single_photon_distribution",
    "single_photon_transfer",
    "sweep_depth",
    "sweep_dimension",
    "symmetrized_display",
    "transfer_distribution",
    "truncation_order",
]
