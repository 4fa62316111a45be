"""
Error hierarchy shared by the services and the CLI
"""

from typing import Optional


class LinBanditError(Exception):
    """Base error carrying a readable detail and a process exit code"""

    exit_code: int = 1

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class InvalidInputError(LinBanditError):
    """Rejected input: wrong dimension, non-finite value, bad index or parameter"""
    exit_code = 2


class ConstructionError(LinBanditError):
    """An instance or dataset could not be built"""
    exit_code = 3


class InfeasibleDirectionError(LinBanditError):
    """Target direction is not in the span of the features"""
    exit_code = 3

    def __init__(self, residual_norm: float):
        super().__init__(
            f"Direction is outside the span of the features "
            f"(residual norm {residual_norm:.3e})")
        self.residual_norm = residual_norm

    def __reduce__(self):
        return (self.__class__, (self.residual_norm,))


class AllocationError(LinBanditError):
    """Decomposition has no usable support"""
    exit_code = 3


class DatasetMissingError(LinBanditError):
    """A feature/outcome table is required but was not provided"""
    exit_code = 4


class BatchAbortedError(LinBanditError):
    """A campaign point failed and the whole batch was aborted"""
    exit_code = 5

    def __init__(self, point, reason: str):
        super().__init__(f"Batch aborted at point {point}: {reason}")
        self.point = point
        self.reason = reason

    def __reduce__(self):
        return (self.__class__, (self.point, self.reason))
