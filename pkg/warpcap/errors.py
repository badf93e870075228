from typing import Optional

import numpy as np


class WarpcapError(Exception):
    pass


class InvalidInput(WarpcapError, ValueError):
    pass


class PreconditionError(WarpcapError):
    pass


class ConfigError(WarpcapError):
    pass


class ExpressionError(ConfigError):
    pass


class ExpressionSyntaxError(ExpressionError):
    def __init__(self, message: str, offset: int, expected: str):
        super().__init__(f"{message} at byte {offset}, expected {expected}")
        self.offset = offset
        self.expected = expected


class UnknownIdentifier(ExpressionError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown identifier '{name}' at byte {offset}")
        self.name = name
        self.offset = offset


class ArityMismatch(ExpressionError):
    def __init__(self, name: str, expected: int, got: int, offset: int):
        super().__init__(
            f"function '{name}' at byte {offset} takes {expected} argument(s), got {got}"
        )
        self.offset = offset


class UnsupportedDerivative(ExpressionError):
    pass


class ExpressionDomainError(InvalidInput):
    def __init__(self, function: str, offset: int):
        super().__init__(
            f"argument of '{function}' at byte {offset} leaves its domain"
        )
        self.function = function
        self.offset = offset


class MeshBudgetExceeded(WarpcapError):
    pass


class UnreachableVertex(WarpcapError):
    pass


class MeshFormatError(ConfigError):
    pass


class DegenerateStencil(WarpcapError):
    pass


class ManufacturedProblemInvalid(WarpcapError):
    pass


class SolverError(WarpcapError):
    """
    Base of all solver failures. Carries the last iterate for diagnosis.
    """

    def __init__(self, message: str, u: Optional[np.ndarray] = None):
        super().__init__(message)
        self.u = u


class SingularJacobian(SolverError):
    pass


class LineSearchFailed(SolverError):
    pass


class MaxIterationsExceeded(SolverError):
    pass


class OracleFailed(SolverError):
    pass


class ContinuationStalled(SolverError):
    def __init__(self, message: str, state):
        super().__init__(message, u=state.u)
        self.state = state
        self.tau = state.tau


class CertificateFailed(WarpcapError):
    def __init__(self, names):
        super().__init__(f"certificates failed: {', '.join(names)}")
        self.names = list(names)
