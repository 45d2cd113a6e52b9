"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, CapacityError -> 3,
NumericalError (and subclasses) -> 4.
"""


class BhcError(Exception):
    """Base class for all package errors."""


class ConfigError(BhcError):
    """Invalid or inconsistent run configuration."""


class CapacityError(BhcError):
    """Requested problem size exceeds a configured resource cap."""


class NumericalError(BhcError):
    """A numerical routine failed to meet its accuracy contract."""


class EdgeSolverError(NumericalError):
    """Iterative extremal-eigenvalue solver did not converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class PropagationError(NumericalError):
    """Time propagation lost unitarity beyond the allowed drift."""


class StateConstructionError(BhcError):
    """No initial state with the requested structure exists."""
