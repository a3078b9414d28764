"""Gradient echo storage of time-bin qubits with temporal compression."""

from .errors import (
    ConfigError,
    CribsimError,
    DomainError,
    GridError,
    GridMismatchError,
    KindError,
    NormalizationError,
    RangeError,
    ResolutionError,
    SeparationError,
    SingularityError,
    WindowError,
    ZeroEchoError,
)
from .qubit import FieldRecord, TimeBinQubit, make_qubit
from .medium import MediumConfig, LONGITUDINAL, TRANSVERSE
from .dynamics import AtomState, ProtocolSchedule, RunResult, run_protocol
from .metrics import MetricReport, analyze
from .config import RunConfig, parse_config, parse_config_file, write_config
from .runner import simulate_run, sweep_run
from .feasibility import feasibility_report

__version__ = "0.1.0"

__all__ = [
    "AtomState",
    "ConfigError",
    "CribsimError",
    "DomainError",
    "FieldRecord",
    "GridError",
    "GridMismatchError",
    "KindError",
    "LONGITUDINAL",
    "MediumConfig",
    "MetricReport",
    "NormalizationError",
    "ProtocolSchedule",
    "RangeError",
    "ResolutionError",
    "RunConfig",
    "RunResult",
    "SeparationError",
    "SingularityError",
    "TRANSVERSE",
    "TimeBinQubit",
    "WindowError",
    "ZeroEchoError",
    "analyze",
    "feasibility_report",
    "make_qubit",
    "parse_config",
    "parse_config_file",
    "run_protocol",
    "simulate_run",
    "sweep_run",
    "write_config",
    "__version__",
]
