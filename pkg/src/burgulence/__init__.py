"""Small-viscosity turbulence toolkit for a scalar conservation law on the
circle.

The package simulates u_t + f'(u) u_x = nu u_xx + eta for a strongly
convex flux f on the unit circle, with eta either absent, a sum of random
kicks at integer times, or smooth-in-space white noise, and measures the
quantities whose small-nu scaling is sharp in this setting: Sobolev norms
growing like negative powers of nu, structure functions with their three
scale ranges, flatness growing like 1/ell, and the k^-2 energy spectrum.

Layout:

- field: periodic grids, spectral fields, norms, snapshot I/O
- flux: the flux functions and their convexity checks
- forcing: kick and white-noise specifications, counter-based streams
- solver: the dealiased integrating-factor scheme, batching, checkpoints
- hopf_cole: closed-form reference solution for the classical flux
- diagnostics: per-state records, structure functions, spectra, envelopes
- scaling: power-law fitting over the resolved scale ranges
- experiments: ensembles, archives, stationary and coupling experiments
- cli: the burgulence command
"""

from .diagnostics import (
    BracketAverage,
    DiagnosticsRecord,
    RangePartition,
    bracket_average,
    energy_spectrum,
    flatness,
    genericity,
    make_record,
    occupation_fraction,
    settling_window,
    structure_function,
)
from .experiments import (
    EmpiricalMeasure,
    EnsembleArchive,
    ExperimentConfig,
    coupling_decay,
    quasi_stationary_check,
    run_ensemble,
    stationary_average,
)
from .field import Field, Grid, SobolevIndex, load_snapshot
from .flux import FluxFunction, classical_flux, cosine_flux, flux_from_name
from .forcing import (
    DOMAIN_FORCING,
    DOMAIN_INITIAL,
    ForcingSpec,
    NoiseStream,
    SpectralAmplitudes,
    random_smooth_field,
)
from .hopf_cole import DynamicRangeFailure, hopf_cole_solve
from .scaling import (
    PowerLawFit,
    fit_power_law,
    flatness_scan,
    sobolev_exponent_sweep,
    spectrum_scan,
    structure_exponent_scan,
)
from .solver import (
    StabilityFailure,
    TimeStepping,
    TrajectoryConfig,
    TrajectoryState,
    integrate,
    integrate_batch,
    load_checkpoint,
    resolution_rule,
    save_checkpoint,
)

__version__ = "0.1.0"

__all__ = [
    "Field",
    "Grid",
    "SobolevIndex",
    "load_snapshot",
    "FluxFunction",
    "classical_flux",
    "cosine_flux",
    "flux_from_name",
    "DOMAIN_FORCING",
    "DOMAIN_INITIAL",
    "ForcingSpec",
    "NoiseStream",
    "SpectralAmplitudes",
    "random_smooth_field",
    "StabilityFailure",
    "TimeStepping",
    "TrajectoryConfig",
    "TrajectoryState",
    "integrate",
    "integrate_batch",
    "resolution_rule",
    "save_checkpoint",
    "load_checkpoint",
    "DynamicRangeFailure",
    "hopf_cole_solve",
    "BracketAverage",
    "DiagnosticsRecord",
    "RangePartition",
    "bracket_average",
    "energy_spectrum",
    "flatness",
    "genericity",
    "make_record",
    "occupation_fraction",
    "settling_window",
    "structure_function",
    "PowerLawFit",
    "fit_power_law",
    "flatness_scan",
    "spectrum_scan",
    "structure_exponent_scan",
    "sobolev_exponent_sweep",
    "EmpiricalMeasure",
    "EnsembleArchive",
    "ExperimentConfig",
    "coupling_decay",
    "quasi_stationary_check",
    "run_ensemble",
    "stationary_average",
    "__version__",
]
