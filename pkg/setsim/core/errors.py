"""
Errors Module
Exception hierarchy shared by the library and the command line.

Every error carries a short ``code`` and the process exit status the CLI
returns for it.
"""

from typing import Optional


class SimulationError(Exception):
    """Base class for every error raised by setsim."""
    code = "SIMULATION_ERROR"
    exit_status = 1


class ConfigError(SimulationError):
    """Scenario file missing, malformed, or physically invalid."""
    code = "CONFIG_ERROR"
    exit_status = 2

    def __init__(self, message: str, details: Optional[list] = None):
        super().__init__(message)
        # list[ErrorDetail], one entry per violation
        self.details = details or []


class InvalidParameterError(SimulationError):
    """A physical parameter is outside its allowed range."""
    code = "INVALID_PARAMETER"


class InvalidProcessError(SimulationError):
    """Inputs do not match the band composition of the requested process."""
    code = "INVALID_PROCESS"


class InvalidInputError(SimulationError):
    """Oracle input that violates its contract (e.g. non-symmetric amplitudes)."""
    code = "INVALID_INPUT"


class GridError(SimulationError):
    """Grid malformed, too short for a waveform, or point not on the grid."""
    code = "GRID_ERROR"


class NumericalDomainError(SimulationError):
    """Integrand produced a non-finite sample."""
    code = "NUMERICAL_DOMAIN"

    def __init__(self, message: str, abscissa: float):
        super().__init__(message)
        self.abscissa = abscissa


class ConvergenceError(SimulationError):
    """Time quadrature did not reach the requested tolerance."""
    code = "CONVERGENCE_FAILURE"
    exit_status = 3

    def __init__(self, message: str, best_estimate=None, achieved_tolerance: float = float("nan")):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.achieved_tolerance = achieved_tolerance


class UndefinedRatioError(SimulationError):
    """Quantum-classical ratio with a vanishing denominator."""
    code = "UNDEFINED_RATIO"
    exit_status = 4


class DegenerateBinError(SimulationError):
    """Signal and idler fall in the same bin."""
    code = "DEGENERATE_BIN"


class TruncationError(SimulationError):
    """Fock-space truncation lost too much norm."""
    code = "TRUNCATION_ERROR"


class ResourceLimitError(SimulationError):
    """Requested grid exceeds the configured cell limit."""
    code = "RESOURCE_LIMIT"
