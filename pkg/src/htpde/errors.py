"""Exception types shared across the package.

The CLI maps these onto process exit codes, so solvers raise them instead of
bare ValueError/RuntimeError whenever the failure mode is meaningful to a
caller: hypothesis violations, numerical non-convergence, loss of positivity,
and malformed configuration.
"""

from __future__ import annotations


class ValidationError(ValueError):
    """Malformed input: bad grid, bad field shape, bad config value."""


class HypothesisError(ValueError):
    """A structural hypothesis of the model fails (e.g. b >= a_min/a_max)."""


class ConvergenceError(RuntimeError):
    """An iterative solver hit its iteration or time budget short of tolerance.

    Carries whatever partial result the solver had, so callers can inspect it.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class PositivityError(RuntimeError):
    """A density became non-positive (or singular) where it must not.

    ``node`` is the flat node index where the violation was detected, ``t``
    the simulation time, and ``suggested_dt`` a smaller step to retry with.
    """

    def __init__(self, message: str, node: int | None = None,
                 t: float | None = None, suggested_dt: float | None = None):
        super().__init__(message)
        self.node = node
        self.t = t
        self.suggested_dt = suggested_dt


class NewtonFallback(RuntimeError):
    """Newton could not proceed (singular system or damping exhausted).

    Callers should fall back to relaxation in time.
    """
