"""Multi-shot classical shadow simulator and statistics laboratory."""

from .cliffords import (
    CliffordTableau,
    GlobalClifford,
    HaarUnitary,
    PauliLayer,
    SINGLE_QUBIT_UNITARIES,
    SingleQubitClifford,
    sample_global,
    sample_haar,
    sample_single,
    sample_tableau_batch,
    to_unitary,
)
from .paulis import DimensionError, PauliString, pauli_enumerate
from .shadows import (
    EstimateReport,
    MeasurementRecord,
    ShadowSet,
    estimate,
    inverse_channel,
    load_shadowset,
    median_of_means,
    run_multishot,
    save_shadowset,
    snapshot_expectation,
)
from .states import (
    OutcomeDistribution,
    QuantumState,
    SpecError,
    born_distribution,
    expectation,
    ghz_projector,
    ghz_theta,
    parse_observable,
    parse_state,
    sample_bitstrings,
)
from .variance import (
    GammaPair,
    VariancePrediction,
    clifford_variance_bound,
    empirical_variance,
    gamma2_pauli_analytic,
    gamma_brute,
    variance_pauli_exact,
    variance_predict,
    xshadow_norm_pauli,
    xshadow_norm_search,
)
from .verifiers import CheckResult, run_checks

__version__ = "0.1.0"

__all__ = [
    "CheckResult",
    "CliffordTableau",
    "DimensionError",
    "EstimateReport",
    "GammaPair",
    "GlobalClifford",
    "HaarUnitary",
    "MeasurementRecord",
    "OutcomeDistribution",
    "PauliLayer",
    "PauliString",
    "QuantumState",
    "SINGLE_QUBIT_UNITARIES",
    "ShadowSet",
    "SpecError",
    "VariancePrediction",
    "born_distribution",
    "clifford_variance_bound",
    "empirical_variance",
    "estimate",
    "expectation",
    "gamma2_pauli_analytic",
    "gamma_brute",
    "ghz_projector",
    "ghz_theta",
    "inverse_channel",
    "load_shadowset",
    "median_of_means",
    "parse_observable",
    "parse_state",
    "pauli_enumerate",
    "run_checks",
    "run_multishot",
    "SingleQubitClifford",
    "sample_bitstrings",
    "sample_global",
    "sample_haar",
    "sample_single",
    "sample_tableau_batch",
    "save_shadowset",
    "snapshot_expectation",
    "to_unitary",
    "variance_pauli_exact",
    "variance_predict",
    "xshadow_norm_pauli",
    "xshadow_norm_search",
]
