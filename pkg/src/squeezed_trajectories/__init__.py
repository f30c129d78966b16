"""Gaussian quantum trajectories of a cavity mode driven by squeezed input fields.

The conditional state of the mode under single- or double-homodyne detection
stays Gaussian and is tracked through ``(alpha, zeta, nu)``; a truncated
Fock-space integrator checks it independently.
"""

from .apriori import (
    AprioriSolution,
    EnsembleAccumulator,
    EnsembleAverage,
    apriori_asymptote,
    apriori_closed_form,
    apriori_rhs,
    ensemble_average,
)
from .config import RunConfig, parse_config, serialize
from .double import (
    DoubleHomodyneConfig,
    closed_form_coherent,
    double_gains,
    double_rhs,
    noise_cov,
    simulate_batch_double,
    simulate_trajectory_double,
    stationary_state_double,
)
from .errors import (
    ConfigError,
    DegenerateDenominator,
    DetunedSystem,
    GridMismatch,
    IntegrationDiverged,
    IntegrationError,
    MatrixExpOverflow,
    MissingKey,
    NonPhysicalBath,
    NotPositiveDefinite,
    ParseError,
    PhysicalityViolation,
    SimulationError,
    SingularDenominator,
    TruncationLeak,
    UnknownKey,
)
from .gaussian import (
    BathSpec,
    GaussianMoments,
    ModelParams,
    check_physical,
    delta_det,
    dispersions,
    is_pure_field,
    kappa,
    pure_squeezed_bath,
)
from .numerics import NoiseCov2, cholesky2, mat_exp, rk4_step
from .runner import RunResult, run
from .single import (
    RiccatiSystem,
    SingleHomodyneConfig,
    build_riccati,
    filter_innovations,
    riccati_rhs,
    simulate_batch,
    simulate_trajectory,
    solve_riccati_mfd,
    stationary_state,
)
from .trajectory import TrajectoryRecord, substream

__version__ = "0.1.0"

__all__ = [
    "AprioriSolution",
    "EnsembleAccumulator",
    "EnsembleAverage",
    "apriori_asymptote",
    "apriori_closed_form",
    "apriori_rhs",
    "ensemble_average",
    "RunConfig",
    "parse_config",
    "serialize",
    "DoubleHomodyneConfig",
    "closed_form_coherent",
    "double_gains",
    "double_rhs",
    "noise_cov",
    "simulate_batch_double",
    "simulate_trajectory_double",
    "stationary_state_double",
    "ConfigError",
    "DegenerateDenominator",
    "DetunedSystem",
    "GridMismatch",
    "IntegrationDiverged",
    "IntegrationError",
    "MatrixExpOverflow",
    "MissingKey",
    "NonPhysicalBath",
    "NotPositiveDefinite",
    "ParseError",
    "PhysicalityViolation",
    "SimulationError",
    "SingularDenominator",
    "TruncationLeak",
    "UnknownKey",
    "BathSpec",
    "GaussianMoments",
    "ModelParams",
    "check_physical",
    "delta_det",
    "dispersions",
    "is_pure_field",
    "kappa",
    "pure_squeezed_bath",
    "NoiseCov2",
    "cholesky2",
    "mat_exp",
    "rk4_step",
    "RunResult",
    "run",
    "RiccatiSystem",
    "SingleHomodyneConfig",
    "build_riccati",
    "filter_innovations",
    "riccati_rhs",
    "simulate_batch",
    "simulate_trajectory",
    "solve_riccati_mfd",
    "stationary_state",
    "TrajectoryRecord",
    "substream",
]

