"""Invariant reduction: branch ODEs, plane curve, uniformization, integrals.

Writing the reduced equation for y(z) = v_z(z) at k = 1 and clearing the
feedback denominator gives a quadratic in y_z,

    F(y, y_z) = y y_z^2 - 2 (y^2 + y/b - q/(2 b^2)) y_z
                + (y^2 + 2 y/b + (1-q)/b^2) y = 0,

whose two roots are the branch ODEs

    y_z = (y^2 + y/b - q/(2 b^2) +- sqrt((q/b^3)(q/(4b) - y))) / y.

Reading (y, y_z) as complex coordinates (zeta, w), F = 0 is a genus-0 plane
curve with singular set {0, q/(4b), infinity}; the substitution

    zeta = q (1 - p^2) / (4 b),    w = (1 - p)(q (1 + p)^2 - 4) / (4 b (p + 1))

parametrizes it rationally (F(zeta(p), w(p)) = 0 identically), and quadrature
of dz = d zeta / w in the p-chart yields closed first integrals per q-regime.

Branch <-> integral pairing.  With the canonical nonnegative chart value
p0 = sqrt(1 - (4b/q) v_z), the conserved combination along a trajectory is

    q > 0:  minus-branch -> plus-form,  plus-branch -> minus-form,
    q < 0:  minus-branch -> minus-form, plus-branch -> plus-form,

because the radical's sign relative to q decides which of +-p0 is the true
chart value (w(s) = (A + q s / (2 b^2)) / zeta).  ``conserved_form`` encodes
this.  The q = 1 antiderivatives carry (p-1)^5 / (p+3)^3 *products* inside
one log: differentiating confirms d(form)/dp equals the chart integrand
(see tests), which pins the exponent signs.

The discriminant line y = q/(4b) solves the branch ODEs only at q = 4
(residual |q - 4| / (4|b|)); that exceptional solution is the slope-1/b
line of the q = 4 catalogue.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    BeyondDiscriminant,
    BranchPointProximity,
    DegenerateDenominator,
    DomainError,
    ImmediateSingular,
    LogDomain,
    ParamError,
    PoleAt,
    RegimeError,
    SingularLine,
)
from .params import ReducedParams

#: relative guard on the (1 - b N)^2 denominator of the reduced operator
DEN_GUARD = 1e-8
#: stop distance from a guard line, relative to max(1, |q/4b|)
GUARD_DIST = 1e-10


class BranchSign(enum.Enum):
    MINUS = "minus"
    PLUS = "plus"

    @property
    def radical_sign(self) -> float:
        return 1.0 if self is BranchSign.PLUS else -1.0


class Sheet(enum.Enum):
    PRINCIPAL = "principal"
    SECOND = "second"


@dataclass(frozen=True)
class BranchId:
    """Branch ODE selector: radical sign plus the curve sheet it lives on."""

    sign: BranchSign = BranchSign.MINUS
    sheet: Sheet = Sheet.PRINCIPAL

    @staticmethod
    def minus() -> "BranchId":
        return BranchId(BranchSign.MINUS, Sheet.PRINCIPAL)

    @staticmethod
    def plus() -> "BranchId":
        return BranchId(BranchSign.PLUS, Sheet.SECOND)


@dataclass
class Trajectory:
    """Sampled branch-ODE solution: y = v_z over z, with accumulated v."""

    zs: np.ndarray
    ys: np.ndarray
    vs: np.ndarray
    terminated_at: str | None = None
    branch: BranchId = field(default_factory=BranchId.minus)


# -----------------------------------------------------------------------------
# reduced ODE residual (general k)
# -----------------------------------------------------------------------------

def reduced_ode_residual(v, v_z, v_zz, params: ReducedParams):
    """Residual a v_z + (sigma^2/2) N / (1 - b N)^2, N the reduced operator.

    Accepts mpmath scalars.  With b = 0 the linear operator
    a v_z + (sigma^2/2) N is used (no denominator).
    """
    k, b, a = params.k, params.b, params.a
    half_s2 = params.sigma ** 2 / 2.0
    N = v_zz + (1.0 - 2.0 * k) * v_z - k * (1.0 - k) * v
    if b == 0.0:
        return a * v_z + half_s2 * N
    den = 1.0 - b * N
    if abs(den) < DEN_GUARD * max(1.0, abs(b * N)):
        raise DegenerateDenominator(f"reduced denominator {den!r} ~ 0")
    return a * v_z + half_s2 * N / den ** 2


# -----------------------------------------------------------------------------
# branch ODEs
# -----------------------------------------------------------------------------

def _radicand(y, params: ReducedParams):
    q, b = params.q, params.b
    return (q / b ** 3) * (q / (4.0 * b) - y)


def branch_rhs(y: float, v: float, branch: BranchId, params: ReducedParams
               ) -> float:
    """Right-hand side of the selected branch equation.

    k = 1: returns y_z as a function of y alone (autonomous).
    k != 1: returns x_v for the first-order system in x(v) = v_z, which picks
    up the k(1-k) v / x coupling term and is generally non-autonomous.
    """
    params.require_nonlinear()
    if params.k == 1.0:
        q, b = params.q, params.b
        if y == 0.0:
            raise SingularLine("y = 0")
        rad = _radicand(y, params)
        if rad < 0.0:
            raise BeyondDiscriminant(
                f"radicand {rad:.3e} < 0: y past the discriminant q/(4b)")
        return (y * y + y / b - q / (2.0 * b * b)
                + branch.sign.radical_sign * math.sqrt(rad)) / y
    return _general_rhs(y, v, branch, params)


def _general_rhs(x: float, v: float, branch: BranchId, params: ReducedParams
                 ) -> float:
    """x_v for general k (x = v_z as a function of v)."""
    sigma2 = params.sigma ** 2
    a, b, k = params.a, params.b, params.k
    if x == 0.0:
        raise SingularLine("x = 0")
    rad = sigma2 * (sigma2 - 8.0 * a * b * x)
    if rad < 0.0:
        raise BeyondDiscriminant(f"radicand {rad:.3e} < 0")
    return (-1.0 + 2.0 * k - sigma2 / (4.0 * a * b ** 2 * x ** 2)
            + 1.0 / (b * x) + k * (1.0 - k) * v / x
            + branch.sign.radical_sign * math.sqrt(rad)
            / (4.0 * a * b ** 2 * x ** 2))


def exceptional_residual(params: ReducedParams) -> float:
    """|y_z - f(y)| for the constant discriminant line y = q/(4b).

    The radical vanishes there, so both branches give the same value; the
    line is a genuine (exceptional) solution exactly when this is zero,
    i.e. at q = 4.
    """
    params.require_nonlinear()
    q, b = params.q, params.b
    y = q / (4.0 * b)
    if y == 0.0:
        raise SingularLine("discriminant line coincides with y = 0")
    rhs = (y * y + y / b - q / (2.0 * b * b)) / y
    return abs(0.0 - rhs)


# -----------------------------------------------------------------------------
# plane curve and uniformization
# -----------------------------------------------------------------------------

def curve_polynomial(zeta, w, params: ReducedParams):
    """F(zeta, w); zero on the curve.  Accepts complex arguments."""
    params.require_nonlinear()
    q, b = params.q, params.b
    return (zeta * w * w
            - 2.0 * (zeta * zeta + zeta / b - q / (2.0 * b * b)) * w
            + (zeta * zeta + 2.0 * zeta / b + (1.0 - q) / b ** 2) * zeta)


def branch_points(params: ReducedParams) -> tuple[float, float]:
    """Finite singular points of w(zeta): the pole location 0 and the
    branch point q/(4b) (the second branch point is at infinity)."""
    params.require_nonlinear()
    return (0.0, params.q / (4.0 * params.b))


def branch_point_w(params: ReducedParams) -> float:
    """Common value of both sheets at the branch point zeta = q/(4b):
    (q - 4) / (4 b), which vanishes exactly at q = 4."""
    params.require_nonlinear()
    return (params.q - 4.0) / (4.0 * params.b)


def curve_eval(zeta, sheet: Sheet, params: ReducedParams,
               branch_tol: float = 1e-9):
    """Root w of F(zeta, w) = 0 on the requested sheet.

    Sheet convention: the principal sheet carries the simple pole at
    zeta = 0 (w ~ -q / (b^2 zeta)); algebraically it is the root
    (A - sign(q) sqrt(rad)) / zeta with A = zeta^2 + zeta/b - q/(2b^2) and
    rad = (q/b^3)(q/(4b) - zeta).  Complex zeta uses the principal square
    root.  The numerically cancelling root is recovered from the product of
    roots, so both sheets stay accurate near zeta = 0.
    """
    params.require_nonlinear()
    q, b = params.q, params.b
    bp = q / (4.0 * b)
    if abs(zeta - bp) < branch_tol * max(1.0, abs(bp)):
        raise BranchPointProximity(
            f"zeta = {zeta} within {branch_tol} of branch point {bp}; "
            "evaluate through the uniformizing chart instead")
    if zeta == 0:
        if sheet is Sheet.PRINCIPAL:
            raise PoleAt("principal sheet has a first-order pole at zeta = 0")
        return 0.0 * zeta
    A = zeta * zeta + zeta / b - q / (2.0 * b * b)
    rad = (q / b ** 3) * (bp - zeta)
    sqrt_rad = np.sqrt(rad) if not np.iscomplexobj(zeta) and rad >= 0 \
        else np.sqrt(complex(rad))
    sgn = 1.0 if q > 0 else -1.0
    C = zeta * zeta + 2.0 * zeta / b + (1.0 - q) / b ** 2
    r_prin = A - sgn * sqrt_rad
    r_sec = A + sgn * sqrt_rad
    # refresh the cancelling numerator from r_prin * r_sec = C zeta^2
    if abs(r_prin) < abs(r_sec):
        r_prin = C * zeta * zeta / r_sec if r_sec != 0 else r_prin
    else:
        r_sec = C * zeta * zeta / r_prin if r_prin != 0 else r_sec
    r = r_prin if sheet is Sheet.PRINCIPAL else r_sec
    return r / zeta


def sheet_expansion_zero(zeta, sheet: Sheet, params: ReducedParams):
    """Leading-order behavior of w(zeta) as zeta -> 0.

    Principal sheet: w ~ -q / (b^2 zeta).  Second sheet: w ~ ((q-1)/q) zeta,
    degenerating to w ~ -2 b zeta^2 at q = 1.  These coefficients follow
    from F = 0 itself (match the O(zeta) terms) and are pinned against
    ``curve_eval`` in the acceptance suite.
    """
    params.require_nonlinear()
    q, b = params.q, params.b
    if sheet is Sheet.PRINCIPAL:
        return -q / (b * b * zeta)
    if q == 1.0:
        return -2.0 * b * zeta * zeta
    return (q - 1.0) / q * zeta


def uniformize(p_param: float, params: ReducedParams) -> tuple[float, float]:
    """Rational point (zeta(p), w(p)) of the curve for chart value p."""
    params.require_nonlinear()
    q, b = params.q, params.b
    if abs(p_param + 1.0) < 1e-12:
        raise PoleAt("w(p) has a pole at p = -1")
    zeta = q * (1.0 - p_param ** 2) / (4.0 * b)
    w = ((1.0 - p_param) * (q * (1.0 + p_param) ** 2 - 4.0)
         / (4.0 * b * (p_param + 1.0)))
    return zeta, w


def p_from_vz(v_z: float, params: ReducedParams) -> float:
    """Canonical nonnegative chart value p = sqrt(1 - (4b/q) v_z).

    The other sheet is reached through the involution p -> -p (paired with
    c -> -c in the q = 4 cubic relations).
    """
    params.require_nonlinear()
    rad = 1.0 - 4.0 * params.b / params.q * v_z
    if rad < 0.0:
        raise DomainError(f"1 - (4b/q) v_z = {rad:.3e} < 0")
    return math.sqrt(rad)


# -----------------------------------------------------------------------------
# implicit first integrals
# -----------------------------------------------------------------------------

def _log(x) -> float:
    if x <= 0.0:
        raise LogDomain(f"log argument {x!r} <= 0")
    return math.log(x)


def implicit_relation(p_param: float, q: float, branch: BranchId) -> float:
    """LHS(p) of the first integral for the selected form family.

    Along a trajectory whose conserved form this is (see
    ``conserved_form``), LHS(p(z)) - drift_coefficient(q) * z is constant.
    branch.sign selects the minus-form (log(p-1)-type) or plus-form
    (log(p+1)-type) family; the q-regime picks the member.  Real-valued:
    arguments outside their domain raise LogDomain rather than silently
    taking absolute values.
    """
    p = p_param
    minus = branch.sign is BranchSign.MINUS
    if q == 0.0:
        raise RegimeError("q = 0 has no branch integral")
    if q > 0.0 and q != 1.0:
        sq = math.sqrt(q)
        if minus:
            return (2.0 * q * _log(p - 1.0)
                    + (q - sq - 2.0) * _log((p + 1.0) * sq - 2.0)
                    + (q + sq - 2.0) * _log((p + 1.0) * sq + 2.0))
        return (2.0 * q * _log(p + 1.0)
                + (q + sq - 2.0) * _log((p - 1.0) * sq - 2.0)
                + (q - sq - 2.0) * _log((p - 1.0) * sq + 2.0))
    if q == 1.0:
        if minus:
            return 1.0 / (1.0 - p) + 0.25 * _log((p + 3.0) ** 3 * (p - 1.0) ** 5)
        return 1.0 / (p + 1.0) + 0.25 * _log((p - 3.0) ** 3 * (p + 1.0) ** 5)
    # q < 0
    s = math.sqrt(-q)
    if minus:
        return (2.0 * s * math.atan((p + 1.0) * s / 2.0)
                - 2.0 * q * _log(p - 1.0)
                + (2.0 - q) * _log(4.0 - q * (p + 1.0) ** 2))
    return (-2.0 * s * math.atan((p - 1.0) * s / 2.0)
            - 2.0 * q * _log(1.0 + p)
            + (2.0 - q) * _log(4.0 - q * (p - 1.0) ** 2))


def chart_integrand(p_param: float, q: float, branch: BranchId) -> float:
    """dz/dp in the uniformizing chart for the selected form family.

    The minus-form integrand is 2 q p (p+1) / ((p-1)(q (p+1)^2 - 4)); the
    plus-form is its p -> -p image.  d(implicit_relation)/dp equals
    drift_coefficient(q) times this.
    """
    p = p_param
    if branch.sign is BranchSign.MINUS:
        return 2.0 * q * p * (p + 1.0) / ((p - 1.0) * (q * (p + 1.0) ** 2 - 4.0))
    return 2.0 * q * p * (p - 1.0) / ((p + 1.0) * (q * (p - 1.0) ** 2 - 4.0))


def drift_coefficient(q: float) -> float:
    """Linear-in-z drift of the matching implicit relation."""
    if q == 0.0:
        raise RegimeError("q = 0 has no branch integral")
    if q == 1.0:
        return 1.0
    if q > 0.0:
        return 2.0 * (q - 1.0)
    return 2.0 * (1.0 - q)


def conserved_form(branch: BranchId, q: float) -> BranchId:
    """Form family that is constant along a trajectory of ``branch``,
    when p is taken as the canonical nonnegative chart value."""
    if q == 0.0:
        raise RegimeError("q = 0 has no branch integral")
    if q > 0.0:
        flipped = (BranchSign.PLUS if branch.sign is BranchSign.MINUS
                   else BranchSign.MINUS)
        return BranchId(flipped, branch.sheet)
    return branch


# -----------------------------------------------------------------------------
# integration
# -----------------------------------------------------------------------------

def integrate_branch(y0: float, z_span: tuple[float, float], branch: BranchId,
                     params: ReducedParams, *, v0: float = 0.0,
                     rtol: float = 1e-9, atol: float = 1e-12,
                     n_samples: int = 400) -> Trajectory:
    """Adaptive RK45 integration of the selected branch ODE.

    k = 1 integrates y(z) directly (with v accumulated alongside); other k
    route through :func:`integrate_branch_general`.  Terminal events detect
    the guard lines y = 0 and y = q/(4b); hitting one sets
    ``terminated_at`` and truncates the trajectory at the refined crossing.
    """
    params.require_nonlinear()
    if params.k != 1.0:
        raise ParamError(
            "z-parametrized integration requires k = 1; "
            "use integrate_branch_general for other exponents")
    q, b = params.q, params.b
    ydisc = q / (4.0 * b)
    guard = GUARD_DIST * max(1.0, abs(ydisc))
    if abs(y0) < guard:
        raise ImmediateSingular("y0 on the singular line y = 0")
    if abs(y0 - ydisc) < guard:
        raise ImmediateSingular("y0 on the discriminant line y = q/(4b)")
    if _radicand(y0, params) < 0.0:
        raise BeyondDiscriminant("y0 past the discriminant line")

    sgn = branch.sign.radical_sign

    def rhs(z, state):
        y = state[0]
        rad = max(_radicand(y, params), 0.0)  # event truncates past the line
        if y == 0.0:
            y = math.copysign(guard, y0)
        dy = (y * y + y / b - q / (2.0 * b * b) + sgn * math.sqrt(rad)) / y
        return [dy, y]

    def ev_zero(z, state):
        return state[0]

    def ev_disc(z, state):
        return state[0] - ydisc

    ev_zero.terminal = True
    ev_disc.terminal = True
    sol = solve_ivp(rhs, z_span, [y0, v0], method="RK45", rtol=rtol, atol=atol,
                    dense_output=True, events=[ev_zero, ev_disc])
    if sol.status == -1:
        raise SingularLine(f"integration failed: {sol.message}")
    z_end = sol.t[-1]
    terminated = None
    if sol.status == 1:
        if len(sol.t_events[0]):
            terminated = "y=0"
        elif len(sol.t_events[1]):
            terminated = "y=q/(4b)"
    zs = np.linspace(z_span[0], z_end, n_samples)
    out = sol.sol(zs)
    return Trajectory(zs=zs, ys=out[0], vs=out[1],
                      terminated_at=terminated, branch=branch)


def integrate_branch_general(x0: float, v_span: tuple[float, float],
                             branch: BranchId, params: ReducedParams, *,
                             z0: float = 0.0, rtol: float = 1e-9,
                             atol: float = 1e-12, n_samples: int = 400
                             ) -> Trajectory:
    """General-k integration of x(v) = v_z with v as independent variable.

    z is recovered alongside from dz/dv = 1/x.  Guard lines are x = 0 and
    the discriminant value x = sigma^2/(8ab) = q/(4b).
    """
    params.require_nonlinear()
    sigma2 = params.sigma ** 2
    a, b = params.a, params.b
    xdisc = sigma2 / (8.0 * a * b)
    guard = GUARD_DIST * max(1.0, abs(xdisc))
    if abs(x0) < guard:
        raise ImmediateSingular("x0 on the singular line x = 0")
    if abs(x0 - xdisc) < guard:
        raise ImmediateSingular("x0 on the discriminant line")

    sgn = branch.sign.radical_sign
    k = params.k

    def rhs(v, state):
        x = state[0]
        if x == 0.0:
            x = math.copysign(guard, x0)
        rad = max(sigma2 * (sigma2 - 8.0 * a * b * x), 0.0)
        dx = (-1.0 + 2.0 * k - sigma2 / (4.0 * a * b ** 2 * x ** 2)
              + 1.0 / (b * x) + k * (1.0 - k) * v / x
              + sgn * math.sqrt(rad) / (4.0 * a * b ** 2 * x ** 2))
        return [dx, 1.0 / x]

    def ev_zero(v, state):
        return state[0]

    def ev_disc(v, state):
        return state[0] - xdisc

    ev_zero.terminal = True
    ev_disc.terminal = True
    sol = solve_ivp(rhs, v_span, [x0, z0], method="RK45", rtol=rtol, atol=atol,
                    dense_output=True, events=[ev_zero, ev_disc])
    if sol.status == -1:
        raise SingularLine(f"integration failed: {sol.message}")
    terminated = None
    if sol.status == 1:
        terminated = "x=0" if len(sol.t_events[0]) else "x=discriminant"
    vs = np.linspace(v_span[0], sol.t[-1], n_samples)
    out = sol.sol(vs)
    return Trajectory(zs=out[1], ys=out[0], vs=vs,
                      terminated_at=terminated, branch=branch)


def drift_along(traj: Trajectory, params: ReducedParams) -> np.ndarray:
    """LHS(p(z)) - coeff * z along a trajectory, for its conserved form.

    Constant (to integration accuracy) when the trajectory stays in a region
    where the real form is defined; entries where a log argument leaves its
    domain are NaN.
    """
    q = params.q
    form = conserved_form(traj.branch, q)
    coeff = drift_coefficient(q)
    out = np.empty_like(traj.zs)
    for i, (z, y) in enumerate(zip(traj.zs, traj.ys)):
        try:
            p = p_from_vz(y, params)
            out[i] = implicit_relation(p, q, form) - coeff * z
        except (LogDomain, DomainError):
            out[i] = np.nan
    return out
