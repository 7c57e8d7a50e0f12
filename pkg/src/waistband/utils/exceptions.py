"""Custom exceptions for the waistband planner"""

from typing import Any


class WaistbandError(Exception):
    """Base exception for the waistband planner"""
    pass

class DomainError(WaistbandError, ValueError):
    """Raised when an argument lies outside the domain of an operation"""
    pass

class RegionError(DomainError):
    """Raised when a linear-region law is asked about an extension beyond it"""
    def __init__(self, extension: float, proportional_limit: float):
        self.extension = extension
        self.proportional_limit = proportional_limit
        super().__init__(
            f"Extension {extension} mm is outside the linear region "
            f"[0, {proportional_limit}] mm; use curve_force instead"
        )

class ConfigurationError(WaistbandError):
    """Raised when a band, wheel or servo description cannot be used"""
    pass

class OutOfRangeError(DomainError):
    """Raised when a target falls outside an envelope or spacing range"""
    def __init__(self, bound: str, value: float, limit: float):
        self.bound = bound
        self.value = value
        self.limit = limit
        super().__init__(f"{value} mm violates {bound} = {limit} mm")

class EnvelopeInvariantError(WaistbandError):
    """Raised when a combined envelope would have min above max"""
    pass

class PlanningError(WaistbandError):
    """Raised when no wheel configuration can serve a target boundary"""
    def __init__(self, target: float, envelope: Any):
        self.target = target
        self.envelope = envelope
        super().__init__(
            f"No configuration serves a {target} mm boundary; machine envelope is "
            f"[{envelope.min_boundary}, {envelope.max_boundary}] mm"
        )

class InfeasibleLimitError(WaistbandError):
    """Raised when no control percentage keeps the servo below the break force"""
    pass

class ConvergenceError(WaistbandError):
    """Raised when a bisection solve misses its residual tolerance"""
    pass

class CycleRejectedError(WaistbandError):
    """Raised when a stretch cycle is rejected before it runs"""
    pass

class SpecFileError(WaistbandError):
    """Raised when a machine or band file cannot be parsed"""
    def __init__(self, path: str, field: str, message: str):
        self.path = path
        self.field = field
        self.message = message
        super().__init__(f"{path}: field '{field}': {message}")
