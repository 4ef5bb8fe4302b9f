"""Exception taxonomy.

Names mirror the error conditions of the public contracts so callers (and the
CLI's exit-code mapping) can dispatch on type: config/schema problems are
``ConfigError``, mathematical-validation failures are ``ValidationError``
subclasses.
"""


class LindforkError(Exception):
    """Base class for all package errors."""


class ConfigError(LindforkError):
    """Malformed problem config / schema violation (CLI exit code 2)."""


class BadEpsilon(ConfigError):
    """Trotter error budget outside (0, 1]."""


class ValidationError(LindforkError):
    """A mathematical precondition failed (CLI exit code 3)."""


class NonHermitianInput(ValidationError):
    """Matrix expected Hermitian is not, beyond tolerance."""


class NotPSD(ValidationError):
    """Matrix expected positive semidefinite has an eigenvalue below -tol."""


class NegativeTime(ValidationError):
    """Evolution time must be nonnegative."""


class NotUnitVector(ValidationError):
    """Vector expected to have unit norm does not."""


class NotUnitary(ValidationError):
    """Matrix expected unitary is not, beyond tolerance."""


class NotSpecialUnitary(ValidationError):
    """Unitary expected to have determinant 1 does not."""


class NotSO3(ValidationError):
    """Matrix expected in SO(3) fails orthogonality or det=+1."""


class DomainError(ValidationError):
    """Scalar argument outside its documented domain."""


class UnloweredGate(LindforkError):
    """Circuit emission reached a gate kind the backend does not accept."""


class IndexOutOfRange(LindforkError):
    """Gate touches a qubit index outside the state."""


class EmptyKeepSet(LindforkError):
    """partial_trace requires a nonempty set of kept qubits."""
