"""
Error types raised by the torus library.

The CLI maps them onto exit codes: parse and usage problems exit 1,
domain errors exit 2, failed numerical identities exit 3.
"""


class TorusError(Exception):
    """Base class for every error raised by this package"""
    exit_code = 2


class DomainError(TorusError, ValueError):
    """An argument lies outside the domain an operation is defined on"""
    exit_code = 2


class BudgetExceededError(DomainError):
    """A lattice sum would need more terms than the configured budget"""


class TorusFormatError(TorusError, ValueError):
    """A file or command-line value could not be parsed"""
    exit_code = 1


class ToleranceError(TorusError):
    """A numerical identity failed at the configured tolerance"""
    exit_code = 3
