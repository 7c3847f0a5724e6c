"""Cnoidal traveling waves of the Serre-Green-Naghdi equations, their
Whitham modulation system, and a 1D time-domain SGN solver."""

__version__ = "0.1.0"

from .elliptic import ellip_K, ellip_E, ellip_Pi, ellip_derivatives
from .waves import (
    RootTriple,
    WaveConstants,
    CnoidalWave,
    constants_from_roots,
    oscillation_rhs,
    jacobi_cn,
    build_wave,
    profile,
    velocity_from_depth,
    wavelength,
    average,
    averaged_h,
    averaged_hinv,
)
from .modulation import (
    ModulationState,
    DifferentialCoefficients,
    QuasilinearSystem,
    EigenClassification,
    ScanResult,
    conserved_vector,
    differential_coefficients,
    assemble_AB,
    characteristic_eigenvalues,
    resultant_quartic,
    scan_region,
    write_scan_csv,
)
from .modulation import state_at_rest
from .solver import (
    SGNField,
    WaveTrainConfig,
    RunResult,
    init_wavetrain,
    step,
    diagnostics,
    phase_portrait,
    portrait_residual,
    run_experiment,
)
from . import errors

__all__ = [
    "ellip_K", "ellip_E", "ellip_Pi", "ellip_derivatives",
    "RootTriple", "WaveConstants", "CnoidalWave",
    "constants_from_roots", "oscillation_rhs", "jacobi_cn", "build_wave",
    "profile", "velocity_from_depth", "wavelength",
    "average", "averaged_h", "averaged_hinv",
    "ModulationState", "DifferentialCoefficients", "QuasilinearSystem",
    "EigenClassification", "ScanResult", "state_at_rest",
    "conserved_vector", "differential_coefficients", "assemble_AB",
    "characteristic_eigenvalues", "resultant_quartic", "scan_region",
    "write_scan_csv",
    "SGNField", "WaveTrainConfig", "RunResult",
    "init_wavetrain", "step", "diagnostics", "phase_portrait",
    "portrait_residual", "run_experiment",
    "errors",
]
