"""Mean exit times of a drifting continuous-time random walk from an interval."""

from __future__ import annotations

# Import adverse-regime solver
from ctrwexit.adverse import (
    AdverseSolution,
    RuinMeanTime,
    mean_exit_after_jump_adverse,
    mean_exit_at_adverse,
    ruin_mean_time,
)

# Import CLI
from ctrwexit.cli import main

# Import run configuration
from ctrwexit.config import RunConfig, load_config, parse_config_text

# Import continuum limit
from ctrwexit.continuum import (
    ContinuumSpec,
    mean_exit_continuum,
    propagator_double_laplace,
    survival_probability,
)

# Import probability models
from ctrwexit.distributions import (
    ErlangWaiting,
    ExponentialJumps,
    ExponentialWaiting,
    JumpModel,
    MixtureJumps,
    OneSidedStableJumps,
    PointMassJumps,
    ProcessSpec,
    TabulatedJumps,
    TabulatedWaiting,
    WaitingTimeModel,
)

# Import exceptions
from ctrwexit.exceptions import (
    ConfigError,
    CoverageError,
    CTRWError,
    DiscretizationError,
    DomainError,
    ModelError,
    NumericalFailureError,
    RegimeError,
    SimulationError,
    SingularityError,
    UnsupportedOperationError,
)

# Import favorable-regime solver
from ctrwexit.favorable import (
    FavorableSolution,
    mean_exit_after_jump,
    mean_exit_at,
    small_v_expansion,
    transform_F,
    transform_J,
)

# Import Laplace inversion
from ctrwexit.laplace import LaplaceFunction, invert, invert_rational, partial_fractions

# Import logging configuration
from ctrwexit.logging_config import setup_logging

# Import Monte Carlo oracle
from ctrwexit.montecarlo import (
    ExitTimeEstimate,
    estimate_exit_after_jump,
    estimate_exit_at,
    sample_excess_life,
)

# Import renewal theory
from ctrwexit.renewal import (
    ExcessLifeLaw,
    RenewalSolution,
    excess_life,
    excess_life_laplace,
    solve_renewal_numeric,
    zero_drift_correction,
)

# Import run orchestration
from ctrwexit.runner import ExitTimeRunner, ResultRow, verify_property

# Import sentinels
from ctrwexit.sentinels import INFINITE, STEADY_STATE, UNDEFINED

# Import two-sided solver
from ctrwexit.twosided import (
    TwoSidedSolution,
    asymptotic_mean_exit,
    mean_exit_equal_rates,
    mean_exit_twosided_general,
    transform_F_ruinjump,
)

__version__ = "0.1.0"

__all__ = [
    # Models
    "ProcessSpec",
    "WaitingTimeModel",
    "ErlangWaiting",
    "ExponentialWaiting",
    "TabulatedWaiting",
    "JumpModel",
    "ExponentialJumps",
    "PointMassJumps",
    "OneSidedStableJumps",
    "TabulatedJumps",
    "MixtureJumps",
    "ContinuumSpec",
    # Sentinels
    "UNDEFINED",
    "INFINITE",
    "STEADY_STATE",
    # Renewal theory
    "RenewalSolution",
    "ExcessLifeLaw",
    "solve_renewal_numeric",
    "excess_life",
    "excess_life_laplace",
    "zero_drift_correction",
    # Laplace inversion
    "LaplaceFunction",
    "invert",
    "invert_rational",
    "partial_fractions",
    # Solvers
    "FavorableSolution",
    "transform_F",
    "transform_J",
    "mean_exit_after_jump",
    "mean_exit_at",
    "small_v_expansion",
    "AdverseSolution",
    "RuinMeanTime",
    "mean_exit_after_jump_adverse",
    "mean_exit_at_adverse",
    "ruin_mean_time",
    "TwoSidedSolution",
    "transform_F_ruinjump",
    "mean_exit_equal_rates",
    "mean_exit_twosided_general",
    "asymptotic_mean_exit",
    "mean_exit_continuum",
    "survival_probability",
    "propagator_double_laplace",
    # Monte Carlo
    "ExitTimeEstimate",
    "estimate_exit_after_jump",
    "estimate_exit_at",
    "sample_excess_life",
    # Runs
    "RunConfig",
    "load_config",
    "parse_config_text",
    "ExitTimeRunner",
    "ResultRow",
    "verify_property",
    "setup_logging",
    # Exceptions
    "CTRWError",
    "ModelError",
    "DomainError",
    "RegimeError",
    "UnsupportedOperationError",
    "CoverageError",
    "NumericalFailureError",
    "SingularityError",
    "DiscretizationError",
    "SimulationError",
    "ConfigError",
    # CLI
    "main",
]
