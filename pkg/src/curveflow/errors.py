"""Exception hierarchy shared by all curveflow modules."""


class CurveflowError(Exception):
    """Base class for every error raised by curveflow."""


class GraphValidationError(CurveflowError, ValueError):
    """A graph document or weighting scheme violates the model constraints."""


class IsolatedVertexError(CurveflowError, ValueError):
    """The operation needs a vertex with positive weighted degree."""


class InadmissibleFunctionError(CurveflowError, ValueError):
    """A test function has vanishing Gamma at the vertex."""


class InfeasibleConstructionError(CurveflowError):
    """A constructive recipe has no valid output for the given graph."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class FlowBlowUpError(CurveflowError, ArithmeticError):
    """The integrator produced a rate below the clamp tolerance or a non-finite value."""


class NotConvergedError(CurveflowError):
    """A converged trajectory was required but the run stopped at the horizon."""
