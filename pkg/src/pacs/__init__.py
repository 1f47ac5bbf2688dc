"""Simulation and analysis of heralded photon-added coherent states.

Submodules
----------
fock         truncated Fock-space states, operators and loss channel
analytics    closed-form properties of photon-added coherent states
heralding    OPA interaction, idler heralding and multiplexed click detection
homodyne     lossy homodyne densities, binned POVMs and sampling
tomography   maximum-likelihood reconstruction
analysis     Wigner function, fidelity, purity, gain and photon statistics
stellar      stellar-rank fidelity thresholds and witnesses
engineering  diagonal operators from addition/subtraction sequences
pipeline     config-driven end-to-end runs
io           JSON and CSV formats
"""

from . import analysis, analytics, engineering, fock, heralding, homodyne, io, pipeline, stellar, tomography
from .analytics import PacsSpec
from .errors import PacsError
from .pipeline import ExperimentConfig, run_pipeline

__all__ = [
    "analysis", "analytics", "engineering", "fock", "heralding", "homodyne", "io", "pipeline", "stellar",
    "tomography", "PacsSpec", "PacsError", "ExperimentConfig", "run_pipeline",
]
__version__ = "0.1.0"
