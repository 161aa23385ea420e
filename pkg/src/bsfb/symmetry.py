"""Point-symmetry machinery: generators, brackets, finite actions, invariants.

The model admits three generators for arbitrary price impact lambda(S) —
time translation and the two additive directions u -> u + alpha S + beta —
and a fourth scaling generator when lambda(S) = omega S^k:

    V1 = d/dt, V2 = S d/du, V3 = d/du, V4 = S d/dS + (1-k) u d/du

with the only nonzero brackets [V2, V4] = -k V2 and [V3, V4] = (1-k) V3.

Brackets are evaluated numerically (central differences on the coefficient
functions) rather than symbolically; for these polynomial coefficients the
differences are exact up to rounding, so the bracket table is a genuine
cross-check of the generator set.

The finite action integrates the generator flow in closed form.  For k not
in {0, 1} the u-component is

    u~ = u e^{(1-k) a1 eps}
         + (a3/(a1 k)) S e^{a1 eps} (1 - e^{-a1 k eps})
         + (a4/(a1 (1-k))) (e^{(1-k) a1 eps} - 1),

which reduces to the dedicated k = 0 and k = 1 expressions in the limit and
is validated against direct numerical integration of the flow ODEs in the
test-suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, ParamError
from .params import GroupElement

Coeff = Callable[[float, float, float], float]


@dataclass(frozen=True)
class VectorField:
    """Vector field xi d/dS + tau d/dt + phi d/du with smooth coefficients."""

    xi: Coeff
    tau: Coeff
    phi: Coeff
    name: str = ""

    def coeffs(self, S: float, t: float, u: float) -> tuple[float, float, float]:
        return (self.xi(S, t, u), self.tau(S, t, u), self.phi(S, t, u))

    def apply(self, f: Coeff, S: float, t: float, u: float,
              h: float = 1e-6) -> float:
        """Directional derivative V(f) at (S, t, u) by central differences."""
        hS = h * max(1.0, abs(S))
        ht = h * max(1.0, abs(t))
        hu = h * max(1.0, abs(u))
        fS = (f(S + hS, t, u) - f(S - hS, t, u)) / (2 * hS)
        ft = (f(S, t + ht, u) - f(S, t - ht, u)) / (2 * ht)
        fu = (f(S, t, u + hu) - f(S, t, u - hu)) / (2 * hu)
        xi, tau, phi = self.coeffs(S, t, u)
        return xi * fS + tau * ft + phi * fu


def generators(k: float = 1.0, special: bool = True) -> list[VectorField]:
    """Symmetry algebra generators; four fields for lambda = omega S^k,
    three for arbitrary lambda."""
    fields = [
        VectorField(lambda S, t, u: 0.0, lambda S, t, u: 1.0,
                    lambda S, t, u: 0.0, name="V1"),
        VectorField(lambda S, t, u: 0.0, lambda S, t, u: 0.0,
                    lambda S, t, u: S, name="V2"),
        VectorField(lambda S, t, u: 0.0, lambda S, t, u: 0.0,
                    lambda S, t, u: 1.0, name="V3"),
    ]
    if special:
        fields.append(VectorField(
            lambda S, t, u: S, lambda S, t, u: 0.0,
            lambda S, t, u: (1.0 - k) * u, name="V4"))
    return fields


def lie_bracket(V: VectorField, W: VectorField, h: float = 1e-6) -> VectorField:
    """Commutator [V, W]: coefficients V(W_i) - W(V_i), evaluated pointwise."""

    def comp(get_w: Coeff, get_v: Coeff) -> Coeff:
        def c(S: float, t: float, u: float) -> float:
            return V.apply(get_w, S, t, u, h) - W.apply(get_v, S, t, u, h)
        return c

    return VectorField(
        xi=comp(W.xi, V.xi), tau=comp(W.tau, V.tau), phi=comp(W.phi, V.phi),
        name=f"[{V.name},{W.name}]")


def expected_bracket(i: int, j: int, k: float):
    """Structure constants: bracket [Vi, Vj] as (scale, index) with
    [Vi, Vj] = scale * V_index, or None for zero.  1-based indices."""
    if i == j:
        return None
    if (i, j) in ((2, 4),):
        return (-k, 2)
    if (i, j) in ((4, 2),):
        return (k, 2)
    if (i, j) in ((3, 4),):
        return (1.0 - k, 3)
    if (i, j) in ((4, 3),):
        return (k - 1.0, 3)
    return None


def group_action(S: float, t: float, u: float, g: GroupElement,
                 k: float = 1.0, special: bool = True
                 ) -> tuple[float, float, float]:
    """Finite symmetry transformation of a point (S, t, u).

    The general-impact action (special=False, or a1 = 0) is

        S~ = S,  t~ = t + a2 eps,  u~ = u + a3 S eps + a4 eps.

    The scaling action (special=True) needs a1 != 0; requesting it with
    a1 = 0 raises ParamError since that degenerates to the general branch.
    """
    if S <= 0:
        raise DomainError(f"S must be positive, got {S}")
    eps = g.epsilon
    if not special:
        return (S, t + g.a2 * eps, u + g.a3 * S * eps + g.a4 * eps)
    if g.a1 == 0.0:
        raise ParamError("scaling action needs a1 != 0; use special=False")
    a1, a2, a3, a4 = g.a1, g.a2, g.a3, g.a4
    e1 = math.exp(a1 * eps)
    S2 = S * e1
    t2 = t + a2 * eps
    if k == 1.0:
        u2 = u + a3 / a1 * S * (e1 - 1.0) + a4 * eps
    elif k == 0.0:
        u2 = u * e1 + a3 * S * eps * e1 + a4 / a1 * (e1 - 1.0)
    else:
        ek = math.exp(a1 * (1.0 - k) * eps)
        u2 = (u * ek
              + a3 / (a1 * k) * S * e1 * (1.0 - math.exp(-a1 * k * eps))
              + a4 / (a1 * (1.0 - k)) * (ek - 1.0))
    return (S2, t2, u2)


def invariants(S: float, t: float, u: float, k: float, a: float
               ) -> tuple[float, float]:
    """Invariant coordinates z = log S + a t, v = u S^(k-1).

    Note the orbit-constant combination for the scaling subgroup generated
    by a1 V4 + a2 V1 is z with a = -a1/a2 (S~ = S e^{a1 eps} grows while
    t~ = t + a2 eps advances, so log S - (a1/a2) t is what stays fixed).
    """
    if S <= 0:
        raise DomainError(f"S must be positive, got {S}")
    if a == 0.0:
        raise ParamError("invariant speed a must be nonzero")
    return (math.log(S) + a * t, u * S ** (k - 1.0))


# -----------------------------------------------------------------------------
# solution transport on sampled surfaces
# -----------------------------------------------------------------------------

def transport_surface(S_grid: np.ndarray, t_grid: np.ndarray, U: np.ndarray,
                      g: GroupElement, k: float = 1.0, special: bool = True
                      ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Map a sampled solution surface through the group action.

    The action sends the tensor grid (S_i, t_j) to another tensor grid, so
    the image is returned as (S~ grid, t~ grid, U~ values).
    """
    S_grid = np.asarray(S_grid, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    U = np.asarray(U, dtype=float)
    if U.shape != (S_grid.size, t_grid.size):
        raise ParamError("U must be shaped (len(S_grid), len(t_grid))")
    eps = g.epsilon
    if not special:
        S2 = S_grid.copy()
        t2 = t_grid + g.a2 * eps
        U2 = U + (g.a3 * S_grid[:, None] + g.a4) * eps
        return S2, t2, U2
    if g.a1 == 0.0:
        raise ParamError("scaling action needs a1 != 0; use special=False")
    a1, a3, a4 = g.a1, g.a3, g.a4
    e1 = math.exp(a1 * eps)
    S2 = S_grid * e1
    t2 = t_grid + g.a2 * eps
    S_col = S_grid[:, None]
    if k == 1.0:
        U2 = U + a3 / a1 * S_col * (e1 - 1.0) + a4 * eps
    elif k == 0.0:
        U2 = U * e1 + a3 * S_col * eps * e1 + a4 / a1 * (e1 - 1.0)
    else:
        ek = math.exp(a1 * (1.0 - k) * eps)
        U2 = (U * ek
              + a3 / (a1 * k) * S_col * e1 * (1.0 - math.exp(-a1 * k * eps))
              + a4 / (a1 * (1.0 - k)) * (ek - 1.0))
    return S2, t2, U2


def surface_residual(S_grid: np.ndarray, t_grid: np.ndarray, U: np.ndarray,
                     params, n_check: tuple[int, int] = (40, 15),
                     margin: tuple[int, int] = (6, 3)):
    """PDE residual statistics of a sampled surface via spline derivatives.

    Fits a quintic tensor spline and evaluates the operator at interior
    probe points (cubic splines carry too much second-derivative error for
    the transported-solution tolerance).  Returns a ResidualReport.
    """
    from scipy.interpolate import RectBivariateSpline

    from .model import ResidualReport, DEN_GUARD

    spl = RectBivariateSpline(S_grid, t_grid, U, kx=5, ky=5)
    mS, mT = margin
    S_in = np.linspace(S_grid[mS], S_grid[-1 - mS], n_check[0])
    t_in = np.linspace(t_grid[mT], t_grid[-1 - mT], n_check[1])
    worst, sumsq, n, skipped = 0.0, 0.0, 0, 0
    for S in S_in:
        for t in t_in:
            uSS = float(spl(S, t, dx=2)[0, 0])
            ut = float(spl(S, t, dy=1)[0, 0])
            diff = params.sigma ** 2 * S ** 2 / 2.0 * uSS
            if params.linear_mode:
                res = ut + diff
            else:
                den = 1.0 - params.b * S ** (params.k + 1.0) * uSS
                if abs(den) < DEN_GUARD * max(1.0, abs(den - 1.0)):
                    skipped += 1
                    continue
                res = ut + diff / den ** 2
            r = abs(res)
            worst = max(worst, r)
            sumsq += r * r
            n += 1
    return ResidualReport(max_abs=worst, l2=float(np.sqrt(sumsq / max(n, 1))),
                          n_samples=n, skipped=skipped,
                          domain_note="spline-derivative surface check")
