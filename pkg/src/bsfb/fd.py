"""Richardson-extrapolated central differences.

These are the independent derivative oracles used by the residual sweeps:
they see only function values, never the analytic derivative formulas being
verified.  Two Richardson levels kill the leading h^2 term, leaving O(h^4)
truncation.

The helpers are arithmetic-generic: pass mpmath scalars in and out for
extended precision (the residual checks near fold points need it).
"""

from __future__ import annotations

from typing import Callable, Sequence


def richardson_d1(f: Callable, x, h):
    """First derivative, central difference with one Richardson step."""
    def d(step):
        return (f(x + step) - f(x - step)) / (2 * step)
    return (4 * d(h / 2) - d(h)) / 3


def richardson_d2(f: Callable, x, h):
    """Second derivative, central difference with one Richardson step."""
    def d(step):
        return (f(x + step) - 2 * f(x) + f(x - step)) / (step * step)
    return (4 * d(h / 2) - d(h)) / 3


def scaled_step(x, base: float = 1e-4, bounds: Sequence | None = None,
                shrink: float = 0.3):
    """Step h = base * max(1, |x|), shrunk so the stencil stays in ``bounds``.

    ``bounds`` is an optional (lo, hi) pair; either end may be None.  The
    stencil reaches x +- h, so h is capped at ``shrink`` times the distance
    to each finite end.
    """
    h = base * max(1.0, abs(float(x)))
    if bounds is not None:
        lo, hi = bounds
        if lo is not None:
            h = min(h, shrink * abs(float(x) - float(lo)))
        if hi is not None:
            h = min(h, shrink * abs(float(hi) - float(x)))
    if h <= 0:
        raise ValueError("empty stencil: x sits on a domain boundary")
    return h
