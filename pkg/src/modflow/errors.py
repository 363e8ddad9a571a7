"""Exception and warning types shared across the package."""

from __future__ import annotations


class ModflowError(Exception):
    """Base class for numeric failures raised by this package."""


class BoundaryPoint(ModflowError, ValueError):
    """A point sits on the excluded point -1 of the circle (infinity on the line)."""


class OutsideDomain(ModflowError, ValueError):
    """An argument lies outside the region where the quantity is defined."""


class BranchError(ModflowError, ValueError):
    """A root branch cannot be chosen because the point is at a component endpoint."""


class SingularDerivative(ModflowError, ZeroDivisionError):
    """The first derivative vanishes, so the Schwarzian is undefined."""


class ConvergenceFailure(ModflowError, RuntimeError):
    """An iterative solver stopped before reaching its tolerance."""


class DegenerateCone(ModflowError, ValueError):
    """Two-interval data with LN - M^2 <= 0."""


class RegulatedPole(ModflowError, ZeroDivisionError):
    """A regulated correlator denominator is smaller than epsilon / 2."""


class DivergentAcceleration(RuntimeWarning):
    """Acceleration evaluated where the inverse temperature is (nearly) zero."""


class NearSingular(RuntimeWarning):
    """Angles are within 1e-8 of a zero of one of the shifted sines sin(a - k pi / n)."""
