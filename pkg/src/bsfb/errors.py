"""Exception hierarchy.

Two broad classes matter for callers:

* ``UsageError`` — bad parameters, out-of-domain arguments, unsupported
  regimes.  The CLI maps these to exit code 2.
* ``NumericalGuard`` — a run-time guard tripped (denominator near zero,
  singular line reached, iteration budget exhausted).  These are expected,
  meaningful stops, not bugs.  The CLI maps them to exit code 4.
"""


class BsfbError(Exception):
    """Base class for all package errors."""


class UsageError(BsfbError):
    """Invalid parameters, arguments, or configuration."""


class NumericalGuard(BsfbError):
    """A numerical guard stopped the computation."""


# -- usage / domain -----------------------------------------------------------

class DomainError(UsageError):
    """Argument outside the mathematical domain (e.g. S <= 0)."""


class DomainEnd(DomainError):
    """Evaluation past the end of a solution family's z-domain."""


class LogDomain(DomainError):
    """A logarithm argument vanished or left the real domain."""


class RegimeError(UsageError):
    """Operation requested in the wrong parameter regime (e.g. q < 0)."""


class LinearModeError(UsageError):
    """Operation requires the nonlinear model (b != 0)."""


class ParamError(UsageError):
    """Inconsistent group or branch parameters."""


class ConfigError(UsageError):
    """Bad CLI / run configuration."""


# -- numerical guards ---------------------------------------------------------

class DegenerateDenominator(NumericalGuard):
    """The feedback denominator 1 - b S^(k+1) u_SS is numerically zero."""


class SingularLine(NumericalGuard):
    """Trajectory reached a line where the branch ODE loses Lipschitz-ness."""


class BeyondDiscriminant(NumericalGuard):
    """Radicand negative: the requested point lies past the discriminant."""


class BranchPointProximity(NumericalGuard):
    """Curve evaluation too close to a branch point for sheet resolution."""


class PoleAt(NumericalGuard):
    """Evaluation at a pole of the requested quantity."""


class ImmediateSingular(NumericalGuard):
    """Integration started on (or within guard distance of) a singular line."""


class DenominatorBreach(NumericalGuard):
    """PDE step would cross the denominator-zero manifold.

    ``nodes`` lists the offending grid indices.
    """

    def __init__(self, message: str, nodes=None):
        super().__init__(message)
        self.nodes = list(nodes) if nodes is not None else []


class NonConvergence(NumericalGuard):
    """Per-step nonlinear iteration exhausted its budget."""
