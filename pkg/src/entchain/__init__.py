"""Exact entanglement entropy dynamics for quenched harmonic-oscillator
chains: per-mode scale-factor evolution, Gaussian-state partial traces,
closed-form entropy spectra, and independent covariance/kernel oracles."""

__version__ = "0.1.0"

from .analysis import (
    PeriodEstimate,
    ScalingFit,
    extract_periods,
    fit_scaling,
    revival_period,
)
from .bosehubbard import BoseHubbardSpec, from_oscillator, mode_frequencies, to_oscillator
from .chain import (
    ChainSpec,
    NormalModes,
    QuenchModes,
    bond_laplacian,
    build_coupling_matrix,
    eigendecompose,
    periodic_eigenvalues,
    quench_modes,
)
from .config import RunConfig, from_dict, parse_config, time_grid
from .entanglement import (
    EntropySeries,
    Partition,
    ReducedState,
    XiSpectrum,
    entropy_series,
    partial_trace,
    reduced_covariance,
    reduced_spectrum,
    renyi_entropy,
    two_site_reduced,
    von_neumann_entropy,
    xi_spectrum,
)
from .ermakov import (
    ModeSolution,
    QuenchProtocol,
    QuenchSchedule,
    compute_tau,
    integrate_general,
    ode_residual,
    solve_sudden,
    sudden_invariant,
)
from .errors import (
    ConfigError,
    EntchainError,
    GridError,
    IntegrationError,
    NumericsError,
)
from .gaussian import (
    GaussianState,
    assemble_state,
    mode_matrices,
    symplectic_eigenvalues,
    symplectic_form,
    to_covariance,
)
from .oracles import (
    KernelGrid,
    SymplecticPropagator,
    covariance_entropy,
    covariance_series,
    ground_state_covariance,
    integrate_covariance_general,
    kernel_spectrum,
    reduce_covariance,
)
from .run import ResultTable, format_csv, make_figure, run, run_sweep, verify_report, write_csv

__all__ = [
    "__version__",
    "BoseHubbardSpec",
    "ChainSpec",
    "ConfigError",
    "EntchainError",
    "EntropySeries",
    "GaussianState",
    "GridError",
    "IntegrationError",
    "KernelGrid",
    "ModeSolution",
    "NormalModes",
    "NumericsError",
    "Partition",
    "PeriodEstimate",
    "QuenchModes",
    "QuenchProtocol",
    "QuenchSchedule",
    "ReducedState",
    "ResultTable",
    "RunConfig",
    "ScalingFit",
    "SymplecticPropagator",
    "XiSpectrum",
    "assemble_state",
    "bond_laplacian",
    "build_coupling_matrix",
    "compute_tau",
    "covariance_entropy",
    "covariance_series",
    "eigendecompose",
    "entropy_series",
    "extract_periods",
    "fit_scaling",
    "format_csv",
    "from_dict",
    "from_oscillator",
    "ground_state_covariance",
    "integrate_covariance_general",
    "integrate_general",
    "kernel_spectrum",
    "make_figure",
    "mode_frequencies",
    "mode_matrices",
    "ode_residual",
    "parse_config",
    "partial_trace",
    "periodic_eigenvalues",
    "quench_modes",
    "reduce_covariance",
    "reduced_covariance",
    "reduced_spectrum",
    "renyi_entropy",
    "revival_period",
    "run",
    "run_sweep",
    "solve_sudden",
    "sudden_invariant",
    "symplectic_eigenvalues",
    "symplectic_form",
    "time_grid",
    "to_covariance",
    "to_oscillator",
    "two_site_reduced",
    "verify_report",
    "von_neumann_entropy",
    "write_csv",
    "xi_spectrum",
]
