"""Quantum error correction with coherent-state probe modes.

Qubits never interact directly: each check is a coherent probe that picks up
a phase from every qubit it passes and is then read out.  The package
simulates that joint qubit/probe state exactly, builds parity and
symmetrizer gates on it, and runs the 3-qubit, Shor and Bell-pair erasure
codes with optional read-out, loss and calibration noise.
"""

__version__ = "0.1.0"

from .state import (Backend, BasisBranch, HybridState, LostQubitError, NormalizationError,
                    ProbeMode, QubitInit, UnsupportedComparisonError, apply_probe_dephasing,
                    fidelity, init_state)
from .measurement import (FootprintError, Mod4Config, Mod4Syndrome, Parity, ParityOutcome,
                          measure_probe_parity, measure_probe_phase_mod4, p_err, p_miss_photon)
from .gates import parity_gate, parity_gate_pm, symmetrizer_gate, syndrome_gate_mod4
from .noise import NoiseSpec, inject_pauli, jittered_theta, lose_qubit, sample_channel
from .codes import (Code, CodeLayout, ProbeSettings, SyndromeMode, SyndromeRecord,
                    UnrecoverableLossError, logical_state)
from .experiments import ExperimentConfig, TrialStats, run_trials, sweep

__all__ = [
    "Backend", "BasisBranch", "HybridState", "LostQubitError", "NormalizationError",
    "ProbeMode", "QubitInit", "UnsupportedComparisonError", "apply_probe_dephasing",
    "fidelity", "init_state",
    "FootprintError", "Mod4Config", "Mod4Syndrome", "Parity", "ParityOutcome",
    "measure_probe_parity", "measure_probe_phase_mod4", "p_err", "p_miss_photon",
    "parity_gate", "parity_gate_pm", "symmetrizer_gate", "syndrome_gate_mod4",
    "NoiseSpec", "inject_pauli", "jittered_theta", "lose_qubit", "sample_channel",
    "Code", "CodeLayout", "ProbeSettings", "SyndromeMode", "SyndromeRecord",
    "UnrecoverableLossError", "logical_state",
    "ExperimentConfig", "TrialStats", "run_trials", "sweep",
]
