"""Base exceptions shared by the flight dynamics models and engine."""


class FlightDynamicsError(Exception):
    """Base class for all errors raised by this package."""
    pass


class ModelValidationError(FlightDynamicsError, ValueError):
    """Exception raised when a domain object violates its invariants."""
    pass
