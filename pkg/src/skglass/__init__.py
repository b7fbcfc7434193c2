"""Numerical laboratory for the mean-field (all-to-all Gaussian) spin glass.

Exact Gray-code enumeration of small systems, annealing and tempering
ground-state solvers, the matched random energy model, and a reproducible
disorder-ensemble harness, all behind one command line (``skglass``).
"""

from .constants import CONSTANTS, LOG2, ReferenceConstants, resolve_beta
from .ensemble import (
    EnsembleStats,
    RunManifest,
    derive_seed,
    make_units,
    merge_stats,
    run_ensemble,
    stable_hash64,
    stats_from_values,
    write_records_csv,
)
from .errors import (
    CapacityError,
    CheckError,
    ConfigError,
    IntegrityError,
    SKGlassError,
)
from .groundstate import (
    AnnealSchedule,
    DensityBoundReport,
    ExtrapolationFit,
    GroundStateResult,
    SolverConfig,
    anneal_ground_state,
    check_density_bound,
    default_ladder,
    density_ensemble,
    exact_ground_state,
    extrapolate_density,
    tempering_ground_state,
)
from .model import (
    Disorder,
    SpinConfig,
    apply_flip,
    bits_from_spins,
    flip_delta,
    hamiltonian,
    load_disorder,
    sample_disorder,
    save_disorder,
    spins_from_bits,
    split_rng,
)
from .rem import (
    RemInstance,
    compare_sk_rem,
    rem_entropy_scan,
    rem_ground_state,
    rem_thermo,
    sample_rem,
)
from .checks import CheckResult, run_checks
from .thermo import (
    ENUMERATION_CAP,
    MEMORY_CAP,
    AlphaReport,
    BetaGrid,
    FigureData,
    MomentReport,
    ThermoResult,
    all_energies,
    alpha_estimate,
    alpha_sample,
    annealed_free_energy,
    emit_figure_data,
    enumerate_thermo,
    functional_equation_residual,
    quenched_free_energy,
    solve_beta_star,
    verify_annealed_moment,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaReport",
    "AnnealSchedule",
    "BetaGrid",
    "CONSTANTS",
    "CapacityError",
    "CheckError",
    "CheckResult",
    "ConfigError",
    "DensityBoundReport",
    "Disorder",
    "ENUMERATION_CAP",
    "EnsembleStats",
    "ExtrapolationFit",
    "FigureData",
    "GroundStateResult",
    "IntegrityError",
    "LOG2",
    "MEMORY_CAP",
    "MomentReport",
    "ReferenceConstants",
    "RemInstance",
    "RunManifest",
    "SKGlassError",
    "SolverConfig",
    "SpinConfig",
    "ThermoResult",
    "all_energies",
    "alpha_estimate",
    "alpha_sample",
    "anneal_ground_state",
    "annealed_free_energy",
    "apply_flip",
    "bits_from_spins",
    "check_density_bound",
    "compare_sk_rem",
    "default_ladder",
    "density_ensemble",
    "derive_seed",
    "emit_figure_data",
    "enumerate_thermo",
    "exact_ground_state",
    "extrapolate_density",
    "flip_delta",
    "functional_equation_residual",
    "hamiltonian",
    "load_disorder",
    "make_units",
    "merge_stats",
    "quenched_free_energy",
    "rem_entropy_scan",
    "rem_ground_state",
    "rem_thermo",
    "resolve_beta",
    "run_checks",
    "run_ensemble",
    "sample_disorder",
    "sample_rem",
    "save_disorder",
    "solve_beta_star",
    "spins_from_bits",
    "split_rng",
    "stable_hash64",
    "stats_from_values",
    "tempering_ground_state",
    "verify_annealed_moment",
    "write_records_csv",
]
