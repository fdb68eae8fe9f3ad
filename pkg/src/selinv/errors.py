"""Exception types raised across the package."""

import numpy as np


class InvalidInputError(ValueError):
    """Malformed pattern, order, graph or file contents."""


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    """A pivot fell below the positive-definiteness threshold.

    ``index`` is the 1-based position of the failing pivot.
    """

    def __init__(self, index, pivot, threshold, message=None):
        self.index = index
        self.pivot = pivot
        self.threshold = threshold
        if message is None:
            message = (f"matrix is not positive definite: pivot S_{index}{index} = "
                       f"{pivot:.6g} <= {threshold:.3g}")
        super().__init__(message)


class SingularMatrixError(np.linalg.LinAlgError):
    pass


class NumericalFailure(ArithmeticError):
    """A local update divided by a pivot that is numerically zero."""

    def __init__(self, message, agent=None, round=None):
        self.agent = agent
        self.round = round
        super().__init__(message)


class NonConvergenceError(RuntimeError):
    """Message passing did not reach a fixed point in the allotted budget."""

    def __init__(self, message, trace=None):
        self.trace = trace
        super().__init__(message)
