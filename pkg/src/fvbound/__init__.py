"""Finite-volume solver for 1D conservation laws with computable
a-posteriori L-inf/L1 error bounds."""

from .grid import Grid1D, SpaceTimeCell, TimeLevels, build_grid, cfl_timestep
from .models import (
    Burgers,
    DomainError,
    PSystem,
    UnsupportedFluxError,
    make_model,
    numerical_entropy_flux,
    numerical_flux,
)
from .riemann import (
    ConvergenceError,
    VacuumError,
    Wave,
    WaveFan,
    cell_average_exact,
    sample,
    solve_riemann,
)
from .solver import SpaceTimeSolution, load_solution, run, save_solution, step
from .residual import (
    ResidualReport,
    SlabTestFunction,
    TestFunctionCoefficients,
    corner_norm_oracle,
    epsilon,
    global_weak_residual,
    local_entropy_triplet,
    local_residual_bound,
    projection_coefficients,
    total_variation,
)
from .partition import (
    JumpRegion,
    SlabPartition,
    SurgeTrapezoid,
    Trapezoid,
    build_surge_trapezoid,
    detect_jumps,
    detect_surges,
    inb,
    oscillation,
    partition_meso_slab,
)
from .estimator import EstimateReport, error_estimator
from .cli import CaseConfig, EoCTable, converge, eoc, linf_l1_error, run_case

__all__ = [
    "Burgers",
    "CaseConfig",
    "ConvergenceError",
    "DomainError",
    "EoCTable",
    "EstimateReport",
    "Grid1D",
    "JumpRegion",
    "PSystem",
    "ResidualReport",
    "SlabPartition",
    "SlabTestFunction",
    "SpaceTimeCell",
    "SpaceTimeSolution",
    "SurgeTrapezoid",
    "TestFunctionCoefficients",
    "TimeLevels",
    "Trapezoid",
    "UnsupportedFluxError",
    "VacuumError",
    "Wave",
    "WaveFan",
    "build_grid",
    "build_surge_trapezoid",
    "cell_average_exact",
    "cfl_timestep",
    "converge",
    "corner_norm_oracle",
    "detect_jumps",
    "detect_surges",
    "eoc",
    "epsilon",
    "error_estimator",
    "global_weak_residual",
    "inb",
    "linf_l1_error",
    "load_solution",
    "local_entropy_triplet",
    "local_residual_bound",
    "make_model",
    "numerical_entropy_flux",
    "numerical_flux",
    "oscillation",
    "partition_meso_slab",
    "projection_coefficients",
    "run",
    "run_case",
    "sample",
    "save_solution",
    "solve_riemann",
    "step",
    "total_variation",
]
