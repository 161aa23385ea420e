"""Parameter bundles for the feedback Black-Scholes model and its reduction.

Model side (PDE in (S, t)):

    u_t + (sigma^2 S^2 / 2) * u_SS / (1 - b S^(k+1) u_SS)^2 = 0,   b = rho*omega

Reduced side (ODE in the invariant variable z = log S + a t, v = u S^(k-1)):

    a v_z + (sigma^2/2) * N / (1 - b N)^2 = 0,
    N = v_zz + (1-2k) v_z - k(1-k) v,           q = sigma^2 / (2 a)

``b`` and ``q`` are always recomputed from their definitions, never stored.
b = 0 switches the model to linear (classic Black-Scholes) mode; the branch
and curve machinery refuses that mode with ``LinearModeError``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .errors import LinearModeError, ParamError


@dataclass(frozen=True)
class ModelParams:
    """PDE coefficient bundle: price impact lambda(S) = omega * S^k."""

    sigma: float
    rho: float
    omega: float
    k: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ParamError(f"sigma must be positive, got {self.sigma}")
        if self.b != 0.0 and not (0.0 < self.rho < 1.0):
            warnings.warn(
                f"rho={self.rho} outside the conventional (0, 1) range",
                stacklevel=2,
            )

    @property
    def b(self) -> float:
        return self.rho * self.omega

    @property
    def linear_mode(self) -> bool:
        return self.b == 0.0

    def reduced(self, a: float) -> "ReducedParams":
        """Reduced-ODE bundle for invariant speed ``a``."""
        return ReducedParams(sigma=self.sigma, a=a, b=self.b, k=self.k)


@dataclass(frozen=True)
class PointState:
    """A point of the second-order jet space on which the PDE operator acts."""

    S: float
    t: float
    u: float = 0.0
    uS: float = 0.0
    ut: float = 0.0
    uSS: float = 0.0


@dataclass(frozen=True)
class ReducedParams:
    """ODE-side coefficient bundle; q = sigma^2 / (2a) is derived."""

    sigma: float
    a: float
    b: float
    k: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ParamError(f"sigma must be positive, got {self.sigma}")
        if self.a == 0.0:
            raise ParamError("invariant speed a must be nonzero")

    @property
    def q(self) -> float:
        return self.sigma ** 2 / (2.0 * self.a)

    @property
    def linear_mode(self) -> bool:
        return self.b == 0.0

    def require_nonlinear(self):
        if self.linear_mode:
            raise LinearModeError("operation requires b != 0")

    @classmethod
    def from_q(cls, q: float, b: float, sigma: float = 1.0, k: float = 1.0
               ) -> "ReducedParams":
        """Construct from q by back-solving a = sigma^2 / (2q)."""
        if q == 0.0:
            raise ParamError("q must be nonzero")
        return cls(sigma=sigma, a=sigma ** 2 / (2.0 * q), b=b, k=k)


@dataclass(frozen=True)
class GroupElement:
    """One-parameter symmetry transformation: orbit position epsilon and
    algebra coefficients (a1..a4)."""

    epsilon: float
    a1: float = 0.0
    a2: float = 0.0
    a3: float = 0.0
    a4: float = 0.0
