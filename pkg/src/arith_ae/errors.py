"""Exception types shared across the package.

The CLI maps these onto exit codes (usage -> 2, capacity -> 3,
internal invariant -> 4) and the web service maps them onto HTTP statuses.
"""


class ArithAEError(Exception):
    """Base class for all package errors."""


class CapacityError(ArithAEError):
    """Requested sieve limit is below 2 or above the configured budget."""


class RangeError(ArithAEError):
    """Argument outside the range covered by a sieve table."""


class ArgumentError(ArithAEError):
    """Invalid configuration or operation argument (maps to usage errors)."""


class ModeError(ArithAEError):
    """Operation applied to a function of the wrong composition mode."""


class EvaluationError(ArithAEError):
    """A kernel produced a non-finite value, or evaluation overflowed."""


class KernelDomainError(EvaluationError):
    """A transform hit a kernel value outside its domain (e.g. log of <= 0)."""


class InternalInvariantError(ArithAEError):
    """A mathematically impossible condition was observed; implementation bug."""
