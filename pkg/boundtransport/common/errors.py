"""Exception hierarchy shared by every module.

Each error is tagged with the module that raised it and maps onto one CLI
exit code through its family.
"""

from boundtransport.common.constants import ExitCode


class BoundTransportError(Exception):
    """Base error; renders as ``[<module>] <message>``."""

    exit_code: ExitCode = ExitCode.NUMERICAL_FAILURE

    def __init__(self, message: str, module: str = "core"):
        super().__init__(message)
        self.message = message
        self.module = module

    def __str__(self) -> str:
        return f"[{self.module}] {self.message}"


class ConfigError(BoundTransportError):
    exit_code = ExitCode.CONFIG_ERROR

    def __init__(self, message: str, module: str = "io_cli", key: str | None = None):
        super().__init__(message, module)
        self.key = key


class NumericalError(BoundTransportError):
    exit_code = ExitCode.NUMERICAL_FAILURE


class InputOutputError(BoundTransportError):
    exit_code = ExitCode.IO_ERROR


# mesh
class MeshParseError(InputOutputError):
    pass


class UnsupportedElementError(InputOutputError):
    pass


class DegenerateElementError(NumericalError):
    pass


# xform
class DomainError(NumericalError):
    pass


class UnsupportedTransformError(NumericalError):
    pass


# models / morphology
class ComplexResultError(NumericalError):
    pass


class DegenerateTensorError(NumericalError):
    pass


class SaturationError(NumericalError):
    pass


class InstabilityError(NumericalError):
    pass


# femcore / solver
class StagnationError(NumericalError):
    pass


class DimensionMismatchError(NumericalError):
    pass


class LinearSolverError(NumericalError):
    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message, module="solver")
        self.residual = residual


class NonConvergenceError(LinearSolverError):
    pass


class SingularMatrixError(LinearSolverError):
    pass


# postproc
class ZeroFluxError(NumericalError):
    pass


class NoIntersectionError(NumericalError):
    pass


# io_cli
class FieldFileError(InputOutputError):
    pass
