"""Custom exception classes for odp."""

from typing import Any, Optional


class OdpError(Exception):
    """Base exception for all odp errors."""

    pass


class ConfigurationError(OdpError):
    """Raised when configuration or problem parameters are invalid or missing."""

    pass


class GridError(OdpError):
    """Raised when a sampled profile does not match its grid."""

    pass


class SolverError(OdpError):
    """Raised when a numerical solve fails."""

    pass


class ConvergenceError(SolverError):
    """Raised when Newton iterations diverge or stall."""

    def __init__(self, message: str, residual: Optional[float] = None, iterations: int = 0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class TrivialSolutionError(SolverError):
    """Raised when Newton converges to the zero solution."""

    pass


class SpectrumError(SolverError):
    """Raised when an eigen solve fails or yields the wrong sign pattern."""

    pass


class SingularModeError(SolverError):
    """Raised when a mode boundary-value solve is near-singular."""

    def __init__(self, message: str, degree: int, cond: float):
        super().__init__(message)
        self.degree = degree
        self.cond = cond


class BracketError(SolverError):
    """Raised when a scan shows no sign change to bracket a root."""

    def __init__(self, message: str, scan: Any = None):
        super().__init__(message)
        self.scan = scan


class DegenerateEndpointError(SolverError):
    """Raised when another mode degenerates at a certificate endpoint."""

    def __init__(self, message: str, degree: int):
        super().__init__(message)
        self.degree = degree


class BranchError(SolverError):
    """Raised when branch continuation fails."""

    def __init__(self, message: str, last_point: Any = None):
        super().__init__(message)
        self.last_point = last_point
