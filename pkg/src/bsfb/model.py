"""Nonlinear PDE residual operator and the degenerate-denominator family.

The hedge-cost equation for a large trader whose hedging feeds back into the
underlying price is

    Delta(u) = u_t + (sigma^2 S^2 / 2) * u_SS / (1 - b S^(k+1) u_SS)^2,

an exact solution satisfies Delta(u) = 0.  The denominator vanishes
identically on the two-parameter family u0(S, t); evaluating the operator
there is refused with ``DegenerateDenominator``.

``residual_sweep`` is the verification workhorse: given any scalar u(S, t)
(typically a closed-form family evaluated under mpmath), it differentiates by
Richardson central differences and reports residual statistics over a grid.
Derivatives come from function values only, never from analytic derivative
formulas, so the sweep is an independent oracle for the families it checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import mpmath as mp
import numpy as np

from .errors import DegenerateDenominator, DomainError, LinearModeError
from .fd import richardson_d1, richardson_d2, scaled_step
from .params import ModelParams, PointState

#: relative guard on |1 - b S^(k+1) u_SS|
DEN_GUARD = 1e-8


@dataclass(frozen=True)
class ResidualReport:
    """Sampled residual statistics from a sweep."""

    max_abs: float
    l2: float
    n_samples: int
    skipped: int = 0
    domain_note: str = ""

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("a residual report needs at least one sample")


def denominator(S, uSS, params: ModelParams):
    """Feedback denominator 1 - b S^(k+1) u_SS (arithmetic-generic)."""
    return 1.0 - params.b * S ** (params.k + 1.0) * uSS


def pde_residual(state: PointState, params: ModelParams) -> float:
    """Evaluate Delta at a jet-space point.

    In linear mode (b = 0) this is the plain Black-Scholes heat operator
    u_t + (sigma^2 S^2/2) u_SS.
    """
    if state.S <= 0:
        raise DomainError(f"S must be positive, got {state.S}")
    diff = params.sigma ** 2 * state.S ** 2 / 2.0 * state.uSS
    if params.linear_mode:
        return state.ut + diff
    den = denominator(state.S, state.uSS, params)
    scale = max(1.0, abs(params.b * state.S ** (params.k + 1.0) * state.uSS))
    if abs(den) < DEN_GUARD * scale:
        raise DegenerateDenominator(
            f"|1 - b S^(k+1) u_SS| = {abs(den):.3e} at S={state.S}, t={state.t}"
        )
    return state.ut + diff / den ** 2


def u0_family(S: float, t: float, c1_fn: Callable[[float], float],
              c2_fn: Callable[[float], float], params: ModelParams) -> float:
    """Solution family of 1 - b S^(k+1) u_SS = 0 (denominator identically zero).

    c1_fn, c2_fn are arbitrary functions of time.
    """
    if params.linear_mode:
        raise LinearModeError("u0 family requires b != 0")
    if S <= 0:
        raise DomainError(f"S must be positive, got {S}")
    b, k = params.b, params.k
    affine = S * c1_fn(t) + c2_fn(t)
    if k == 1.0:
        return -np.log(S) / b + affine
    if k == 0.0:
        return S * np.log(S) / b + affine
    return S ** (1.0 - k) / (b * k * (k - 1.0)) + affine


def u0_uss(S: float, params: ModelParams) -> float:
    """Analytic u_SS of the u0 family: S^-(k+1) / b for every k.

    The time-dependent affine part contributes nothing, so the denominator
    1 - b S^(k+1) u0_SS vanishes identically.
    """
    if params.linear_mode:
        raise LinearModeError("u0 family requires b != 0")
    if S <= 0:
        raise DomainError(f"S must be positive, got {S}")
    return S ** (-(params.k + 1.0)) / params.b


def residual_sweep(u_fn: Callable, S_vals: Sequence[float],
                   t_vals: Sequence[float], params: ModelParams, *,
                   dps: int = 30, h_base: float = 1e-5,
                   valid=None, z_bounds_of=None,
                   derivative_scale: float = 1.0,
                   domain_note: str = "") -> ResidualReport:
    """Residual statistics of a scalar u(S, t) over the grid S_vals x t_vals.

    u_fn must accept mpmath scalars when ``dps`` > 0; derivatives are taken
    with mpmath Richardson differences at that working precision.  Grid
    points where ``valid(S, t)`` is false, or where the family evaluation or
    the denominator guard fails, are counted in ``skipped``.

    ``z_bounds_of(S, t)`` may return (dist_lo, dist_hi): distances from the
    point to the family's domain ends measured along log S.  The S-stencil is
    shrunk so it cannot step over a domain end.

    ``derivative_scale`` multiplies the finite-difference derivatives; it is
    a fault-injection hook used to demonstrate the sweep detects broken
    families (any value != 1 must produce residual breaches).
    """
    worst = 0.0
    sumsq = 0.0
    n = 0
    skipped = 0
    with mp.workdps(dps):
        for S in S_vals:
            for t in t_vals:
                if valid is not None and not valid(S, t):
                    skipped += 1
                    continue
                mS, mt = mp.mpf(S), mp.mpf(t)
                hS = h_base * max(1.0, S)
                if z_bounds_of is not None:
                    dlo, dhi = z_bounds_of(S, t)
                    # stencil shift in z is ~ hS / S
                    hS = min(hS, 0.3 * S * dlo, 0.3 * S * dhi)
                    if hS <= 0:
                        skipped += 1
                        continue
                ht = h_base * max(1.0, abs(t))
                try:
                    uSS = richardson_d2(lambda s: u_fn(s, mt), mS, mp.mpf(hS))
                    ut = richardson_d1(lambda tt: u_fn(mS, tt), mt, mp.mpf(ht))
                except (DomainError, ValueError):
                    skipped += 1
                    continue
                uSS *= derivative_scale
                ut *= derivative_scale
                diff = mp.mpf(params.sigma) ** 2 * mS ** 2 / 2 * uSS
                if params.linear_mode:
                    res = ut + diff
                else:
                    den = 1 - mp.mpf(params.b) * mS ** (params.k + 1.0) * uSS
                    scale = max(1.0, abs(float(den - 1)))
                    if abs(den) < DEN_GUARD * scale:
                        skipped += 1
                        continue
                    res = ut + diff / den ** 2
                r = abs(float(res))
                worst = max(worst, r)
                sumsq += r * r
                n += 1
    if n == 0:
        raise DomainError("residual sweep found no valid grid points")
    return ResidualReport(max_abs=worst, l2=float(np.sqrt(sumsq / n)),
                          n_samples=n, skipped=skipped,
                          domain_note=domain_note)
