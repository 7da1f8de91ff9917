"""Closed-form RIS phase design for joint sensing and communication.

A lightweight toolkit: communication-optimal RIS phases plus a regularized
least-squares perturbation that steers beampattern gain toward sensing
targets, benchmarked against a semidefinite-relaxation solver.
"""

__version__ = "0.1.0"

from .beamforming import Metrics, SystemConstants, beampattern_gain, comm_snr_mrt, mrt_beamformer
from .channel import ArrayGeometry, ChannelSet, build_channels, child_rng
from .config import LambdaPolicy, ScenarioConfig, TargetSpec, load_default_scenario
from .errors import (
    CapExceeded,
    ConfigError,
    DegenerateGeometry,
    Infeasible,
    NonConvergence,
    NumericalError,
    RisIsacError,
    ShapeError,
)
from .perturb import (
    PerturbationSystem,
    RisPhase,
    SolveReport,
    build_system,
    comm_optimal_phase,
    compose_phase,
    gain_upper_bound,
    solve_perturbation,
)
from .pipeline import SolveOutcome, resolve_lambda, solve_scenario
from .sdr import SdpProblem, SdrSolution, gaussian_randomization, solve_sdp

__all__ = [
    "__version__",
    "ArrayGeometry",
    "CapExceeded",
    "ChannelSet",
    "ConfigError",
    "DegenerateGeometry",
    "Infeasible",
    "LambdaPolicy",
    "Metrics",
    "NonConvergence",
    "NumericalError",
    "PerturbationSystem",
    "RisIsacError",
    "RisPhase",
    "ScenarioConfig",
    "SdpProblem",
    "SdrSolution",
    "ShapeError",
    "SolveOutcome",
    "SolveReport",
    "SystemConstants",
    "TargetSpec",
    "beampattern_gain",
    "build_channels",
    "build_system",
    "child_rng",
    "comm_optimal_phase",
    "comm_snr_mrt",
    "compose_phase",
    "gain_upper_bound",
    "gaussian_randomization",
    "load_default_scenario",
    "mrt_beamformer",
    "resolve_lambda",
    "solve_perturbation",
    "solve_scenario",
    "solve_sdp",
]
