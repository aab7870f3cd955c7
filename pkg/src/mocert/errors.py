"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: input-type errors exit with 2,
numerical failures with 3.
"""


class CertificationError(Exception):
    """Base class for all package errors."""


class InputError(CertificationError, ValueError):
    """Malformed argument: wrong dimension, negative tolerance, bad weights."""


class ConfigurationError(InputError):
    """An instance or run configuration is incomplete (e.g. no box for a grid)."""


class RegistryLookupError(InputError, KeyError):
    """Unknown registry key."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class PreconditionError(InputError):
    """An operation was called on inputs that violate its precondition."""


class DomainError(InputError):
    """A formula was evaluated outside its domain (e.g. non-positive denominator)."""


class NotApplicableError(CertificationError):
    """A check does not apply to the instance (e.g. Slater test without constraints)."""


class EvaluationError(CertificationError):
    """An oracle returned a non-finite value."""

    def __init__(self, message, kind=None, index=None):
        super().__init__(message)
        self.kind = kind
        self.index = index


class NumericalError(CertificationError):
    """A numerical kernel failed to produce a usable answer."""


class SolverError(NumericalError):
    """An iterative solver hit its iteration cap; the best iterate is attached."""

    def __init__(self, message, best=None, iterations=None):
        super().__init__(message)
        self.best = best
        self.iterations = iterations


class NoCertificateError(CertificationError):
    """No multiplier certificate exists on the finite system that was examined."""
