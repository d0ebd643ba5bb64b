"""Exception types shared across the package."""


class FrameQError(Exception):
    """Base class for all frameq errors."""


class ChartMismatch(FrameQError):
    """Operands live on different charts."""


class NonInvertibleMap(FrameQError):
    """The affine part of a trivialization map is singular."""


class NonPolynomialResult(FrameQError):
    """A symbolic operation left the polynomial ring."""


class NotProjectable(FrameQError):
    """A vector field does not project to the base (components involve momenta)."""


class NotInQuantumAlgebra(FrameQError):
    """The function is outside the algebra the quantization map accepts."""


class NotHermitian(FrameQError):
    """Operator coefficients would produce a non-Hermitian matrix."""


class HermiticityViolation(FrameQError):
    """An expectation value came out with a non-negligible imaginary part."""


class NoConvergence(FrameQError):
    """An eigenpair failed its residual check."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class FlowEscape(FrameQError):
    """An integral curve left the chart domain."""


class StiffFlow(FrameQError):
    """The adaptive integrator underflowed its step size."""


class BlowUp(FrameQError):
    """A fixed-step trajectory became non-finite."""

    def __init__(self, message, last_point=None):
        super().__init__(message)
        self.last_point = last_point


class ExpressionError(FrameQError):
    """An expression string failed to parse; carries the offending position."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class ScenarioError(FrameQError):
    """A scenario file failed validation."""
