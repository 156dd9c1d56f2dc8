"""
Exception hierarchy for the precoding toolkit.

Every error carries the process exit code the command-line front end
reports for it: 2 infeasible, 3 numerical failure, 4 configuration or
input error.
"""


class PhySiError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class DimensionMismatch(PhySiError, ValueError):
    """Array shapes or index sets do not fit together."""

    exit_code = 4


class IndexOutOfRange(PhySiError, IndexError):
    """A scheme index is outside the current scheme list."""

    exit_code = 4


class DimensionTooLarge(PhySiError, ValueError):
    """A brute-force oracle was asked to search too many dimensions."""

    exit_code = 4


class ConfigError(PhySiError, ValueError):
    """Experiment configuration could not be parsed or validated."""

    exit_code = 4


class RankDeficient(PhySiError, ValueError):
    """The stacked channel matrix does not have full rank."""

    exit_code = 3


class NotPSD(PhySiError, ValueError):
    """A covariance matrix is not Hermitian positive semidefinite."""

    exit_code = 3


class NumericalFailure(PhySiError, RuntimeError):
    """An iterative solver did not converge within its limits."""

    exit_code = 3


class PhySiInfeasible(PhySiError):
    """GSVD-based service integration cannot carry both messages."""

    exit_code = 2
