"""Exception types shared across the package."""


class ConvergenceError(RuntimeError):
    """A quadrature or solver refinement did not settle within tolerance.

    ``values`` holds the successive estimates that disagreed.
    """

    def __init__(self, message, values=None):
        super().__init__(message)
        self.values = values


class ResourceCapError(RuntimeError):
    """Requested problem size exceeds the configured memory cap."""


class BoundaryMassWarning(UserWarning):
    """A truncated log-grid integral has non-negligible mass at its ends."""
