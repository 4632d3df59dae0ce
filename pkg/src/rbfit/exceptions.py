"""Error types shared across the package.

The CLI maps these onto exit codes: configuration problems exit 2, input-data
problems exit 3, numerical failures exit 4 (see `rbfit.cli`).
"""


class ConfigurationError(ValueError):
    """An invalid combination of kernel, polynomial tail, solver or storage."""


class DataError(ValueError):
    """Malformed or inconsistent input data (CSV files, model JSON)."""


class DuplicatePointError(DataError):
    """Two interpolation sites coincide; the kernel block would be singular."""


class NumericalError(RuntimeError):
    """Base class for failures of the linear algebra itself."""


class SingularSystemError(NumericalError):
    """Pivot of the full block factorization fell below the safety threshold."""

    def __init__(self, message: str, pivot: float):
        super().__init__(message)
        self.pivot = pivot


class SingularBlockError(NumericalError):
    """The kernel block B is not (numerically) positive definite."""


class RankDeficientError(NumericalError):
    """The polynomial block P does not have full column rank."""


class ConvergenceError(NumericalError):
    """Iterative solve hit its iteration cap before reaching tolerance."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
