"""Exception types raised by pulsepair.

The CLI maps each of these onto a stable process exit code, so new
errors should subclass one of the existing categories.
"""


class PulsePairError(Exception):
    """Base class for all library errors."""


class SteadyStateError(PulsePairError, ValueError):
    """The writing-stage steady state is undefined (both writing fields off)."""


class UnsupportedRegimeError(PulsePairError, ValueError):
    """A closed form was requested outside the regime it was derived for."""


class ResampleRequiredError(PulsePairError, ValueError):
    """An operation needs a uniform time grid and got something else."""


class NumericFailureError(PulsePairError, RuntimeError):
    """Quadrature or integration did not converge.

    ``diagnostics`` carries whatever the failing routine knew at the time
    (error estimates, interval, solver message).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class StiffnessError(NumericFailureError):
    """Adaptive ODE stepping collapsed to an unusable step size."""

    def __init__(self, message, t=None, state=None, diagnostics=None):
        super().__init__(message, diagnostics)
        self.t = t
        self.state = state


class DegenerateFitError(PulsePairError, ValueError):
    """Fit data carry no information (all zeros or too few points)."""
