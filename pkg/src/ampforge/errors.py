"""Exception hierarchy.

Every error raised on purpose by the library derives from ``AmpforgeError``.
Errors that signal bad caller input also derive from ``ValueError`` so that
generic callers can catch them the usual way.
"""


class AmpforgeError(Exception):
    """Base class for all library errors."""


class UsageError(AmpforgeError, ValueError):
    """Arguments are malformed or inconsistent (wrong sizes, bad flags)."""


class ResourceLimitError(AmpforgeError):
    """A register would exceed the configured qubit cap."""


class DegeneratePostselectionError(AmpforgeError):
    """Post-selection succeeds with (numerically) zero probability."""


class ContractionViolationError(AmpforgeError, ValueError):
    """A matrix handed to ``dilate`` has spectral norm above one."""


class NotAnSPBEError(AmpforgeError):
    """A unitary does not prepare the claimed state in its ancilla-zero branch."""


class NotDivisibleError(AmpforgeError, ValueError):
    """A polynomial with non-zero constant term cannot be divided by x."""


class DegreeOverflowError(AmpforgeError):
    """The degree needed to reach a tolerance exceeds the configured cap."""


class DomainError(AmpforgeError, ValueError):
    """A function is evaluated or composed outside its valid interval."""


class PolynomialTooLargeError(AmpforgeError, ValueError):
    """An eigenvalue-transform polynomial exceeds the 1/4 sup-norm budget."""


class WrongEngineError(AmpforgeError, ValueError):
    """The importance engine was asked to handle a polynomial with P(0) != 0."""


class VanishingTargetError(AmpforgeError):
    """The transformed target vector is (numerically) zero."""


class BadPromiseError(AmpforgeError):
    """The promised top amplitude or gap is inconsistent with the state."""


class DegenerateError(AmpforgeError):
    """A normalisation constant needed by a bound is zero."""
