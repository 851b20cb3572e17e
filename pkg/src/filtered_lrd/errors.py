"""
Exception hierarchy. Every error carries the CLI exit code it maps to.
"""

from typing import Any


class LrfError(Exception):
    exit_code: int = 1


class ConfigError(LrfError, ValueError):
    exit_code = 2


class ContractError(LrfError, ValueError):
    exit_code = 2


class InadmissibleParametersError(ContractError):
    pass


class UnsupportedDegreeError(ContractError):
    pass


class UnsupportedRankError(ContractError):
    pass


class RankUndeterminedError(ContractError):
    pass


class WindowCoverageError(ContractError):
    pass


class MemoryBudgetError(ContractError):
    pass


class InsufficientDesignError(ContractError):
    pass


class NumericalError(LrfError, ArithmeticError):
    exit_code = 3


class HermiteEvaluationError(NumericalError):
    node: float

    def __init__(self, message: str, node: float):
        super().__init__(message)
        self.node = node

    def __reduce__(self):
        return type(self), (str(self), self.node)


class SpectralSingularityError(NumericalError):
    pass


class SingularMultiplierError(NumericalError):
    pass


class EmbeddingFailureError(NumericalError):
    min_eigenvalue: float
    padding: int

    def __init__(self, message: str, min_eigenvalue: float, padding: int):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue
        self.padding = padding

    def __reduce__(self):
        return type(self), (str(self), self.min_eigenvalue, self.padding)


class QuadratureError(NumericalError):
    pass


class InconclusiveScanError(NumericalError):
    diagnostics: dict[str, Any]

    def __init__(self, message: str, diagnostics: dict[str, Any]):
        super().__init__(message)
        self.diagnostics = diagnostics

    def __reduce__(self):
        return type(self), (str(self), self.diagnostics)


class PrecisionNotReachedError(NumericalError):
    # The partial estimate is whatever the caller was computing (value + stderr)
    partial: Any

    def __init__(self, message: str, partial: Any):
        super().__init__(message)
        self.partial = partial

    def __reduce__(self):
        return type(self), (str(self), self.partial)


class OutputError(LrfError, OSError):
    exit_code = 4
