"""Exception hierarchy shared by all orthostat subpackages."""


class OrthostatError(Exception):
    """Base class for errors raised by orthostat."""

    pass


class DomainError(OrthostatError, ValueError):
    """An argument lies outside the domain an operation is defined on."""

    pass


class UnsupportedError(OrthostatError, NotImplementedError):
    """The request is well-formed but not implemented (e.g. k > 3 moments)."""

    pass


class NumericalError(OrthostatError, ArithmeticError):
    """A computation produced a non-finite value."""

    pass


class CalibrationError(OrthostatError):
    """Root finding for a free expansion constant failed."""

    pass


class ConfigurationError(OrthostatError):
    """A config file, data file, preset or schedule is missing or malformed."""

    pass


class EstimationError(DomainError):
    """Too few samples to form a standard error."""

    pass
