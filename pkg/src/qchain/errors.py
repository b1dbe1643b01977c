"""Exception types shared across the package."""


class SpecificationError(ValueError):
    """Invalid chain parameters (e.g. a ring with fewer than three qubits)."""


class UsageError(ValueError):
    """Arguments with inconsistent shapes or unsupported options."""


class UnsupportedError(UsageError):
    """Operation requested outside its supported domain."""


class DomainError(ValueError):
    """Closed-form expression evaluated outside its domain (e.g. gamma = 0)."""


class InvariantViolation(ArithmeticError):
    """A physical invariant was violated beyond numerical slack."""


class ResourceGuardError(UsageError):
    """Brute-force request exceeds the hard size cap."""


class NumericalFailure(RuntimeError):
    """An integrator failed to converge; ``diagnostics`` holds solver details."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
