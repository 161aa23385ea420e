"""Exact invariant-solution catalogue at q = 4 (plus linear families).

With q = sigma^2/(2a) = 4 the first integrals of the reduced branch ODEs
exponentiate to the cubic relations

    (p - 1)^2 (p + 2) = c e^{3z/2}      (minus form)
    (p + 1)^2 (p - 2) = c e^{3z/2}      (plus form)

linked by the sheet involution (p, c) -> (-p, -c).  Solving the cubic for
p(z) and integrating v_z = (1 - p^2)/b yields the full catalogue:

* ``euler_plus``  (c > 0): the single-real-root branch, rationalized by the
  Euler substitution tau = 2 + c e^{3z/2} + sqrt(4 c e^{3z/2} + c^2 e^{3z});
  defined for all z.
* ``trig1``/``trig2`` (c < 0): two of the three-real-root branches, written
  through arccos; both live on z <= z* and coincide at z*.
* ``three_piece`` (c < 0): the third root, trigonometric below z* and
  hyperbolic above, continuous across.

z* is where the cubic's three-real-root window closes, i.e. where
|c| e^{3 z*/2} = 4:  z* = (2/3) ln(4/|c|)  (equal to (4/3) ln(2/|c|) at
|c| = 1, the parameter value used throughout the verification suite).

Mapped to (S, t) via z = log S + (sigma^2/8) t, every 1/b becomes
1/(omega rho); the printed euler_plus map uses the half-scaled constant
(u(S, t; c) = v_plus(z; 2c), a relabeling of the free constant).

Formulas are written once against a math backend (numpy for vectorized
evaluation, mpmath for the extended-precision residual sweeps).

Numerical edges: arccos/arccosh arguments are clamped into domain within a
1e-12 slack (beyond it: DomainEnd); where a log(sin/cos combination)
underflows (far z -> -infinity tail), evaluation returns a -inf sentinel
rather than NaN and sweeps skip the band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._mathlib import MP, NP
from .errors import DomainEnd, DomainError, LinearModeError, ParamError, RegimeError
from .params import ModelParams

#: slack absorbed when clamping inverse-trig arguments at domain ends
CLAMP_SLACK = 1e-12
#: |sin(theta/6)|-style guard below which the log terms are -inf tagged
SIN_GUARD = 1e-8

FAMILIES = (
    "const",
    "line_slope_minus3_over_b",
    "line_slope_1_over_b",
    "const_slope_general_q",
    "euler_plus",
    "trig1",
    "trig2",
    "three_piece",
    "degenerate_u0",
)

#: families needing c < 0 and (for trig1/trig2) the bounded z-domain
TRIG_FAMILIES = ("trig1", "trig2", "three_piece")


@dataclass(frozen=True)
class SolutionBranch:
    """Tagged member of the catalogue with its free constants."""

    family: str
    c: float = 0.0
    d: float = 0.0
    slope: float | None = None  # set for constant-slope members

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParamError(f"unknown family {self.family!r}")
        if self.family == "euler_plus" and not self.c > 0:
            raise ParamError("euler_plus requires c > 0")
        if self.family in TRIG_FAMILIES and not self.c < 0:
            raise ParamError(f"{self.family} requires c < 0")


def z_star(c: float) -> float:
    """Right end of the three-real-root window: (2/3) ln(4/|c|)."""
    if c == 0.0:
        raise ParamError("c must be nonzero")
    return (2.0 / 3.0) * math.log(4.0 / abs(c))


# -----------------------------------------------------------------------------
# cubic relations
# -----------------------------------------------------------------------------

def cubic_lhs(p, which: str):
    """LHS of the q = 4 first-integral cubic; which is 'cubm' or 'cubp'."""
    if which == "cubm":
        return (p - 1.0) ** 2 * (p + 2.0)
    if which == "cubp":
        return (p + 1.0) ** 2 * (p - 2.0)
    raise ParamError(f"which must be 'cubm' or 'cubp', got {which!r}")


def cubic_roots_p(z: float, c: float, which: str) -> list[float]:
    """All real roots p of cubic_lhs(p) = c e^{3z/2}, sorted ascending.

    One root in the single-real-root regime, three (counting the boundary
    double root) otherwise.  Solved through the trigonometric /hyperbolic
    closed form of the depressed cubic p^3 - 3p = m.
    """
    rhs = c * math.exp(1.5 * z)
    if which == "cubm":
        m = rhs - 2.0
    elif which == "cubp":
        m = rhs + 2.0
    else:
        raise ParamError(f"which must be 'cubm' or 'cubp', got {which!r}")
    if abs(m) <= 2.0:
        th = math.acos(m / 2.0)
        roots = [2.0 * math.cos((th + 2.0 * math.pi * j) / 3.0)
                 for j in range(3)]
        return sorted(roots)
    eta = math.acosh(abs(m) / 2.0)
    return [2.0 * math.copysign(math.cosh(eta / 3.0), m)]


# -----------------------------------------------------------------------------
# scalar cores (backend-generic)
# -----------------------------------------------------------------------------

def _clamped_arccos(x, L):
    xf = float(x)
    if xf > 1.0 + CLAMP_SLACK or xf < -1.0 - CLAMP_SLACK:
        raise DomainEnd(f"arccos argument {xf} outside [-1, 1]")
    if xf > 1.0:
        x = type(x)(1.0) if not isinstance(x, float) else 1.0
    elif xf < -1.0:
        x = type(x)(-1.0) if not isinstance(x, float) else -1.0
    return L.arccos(x)


def _clamped_arccosh(x, L):
    xf = float(x)
    if xf < 1.0 - CLAMP_SLACK:
        raise DomainEnd(f"arccosh argument {xf} below 1")
    if xf < 1.0:
        x = type(x)(1.0) if not isinstance(x, float) else 1.0
    return L.arccosh(x)


def _v_plus_core(z, c, b, d, L):
    E = L.exp(1.5 * z)
    inner = 4.0 * c * E + c * c * E * E  # nonnegative for c > 0
    tau = 2.0 + c * E + L.sqrt(inner)
    m = L.cbrt(tau / 2.0)
    return -(m * m + 1.0 / (m * m)) / b - 2.0 / b * L.log(m + 1.0 / m - 2.0) + d


def _vz_plus_core(z, c, b, L):
    E = L.exp(1.5 * z)
    tau = 2.0 + c * E + L.sqrt(4.0 * c * E + c * c * E * E)
    m = L.cbrt(tau / 2.0)
    return -(1.0 + m * m + 1.0 / (m * m)) / b


def _v1_core(z, c_abs, b, d, L):
    th = _clamped_arccos(1.0 - c_abs / 2.0 * L.exp(1.5 * z), L)
    s6 = L.sin(th / 6.0)
    if abs(float(s6)) < SIN_GUARD:
        return float("-inf")
    return (z / b - 2.0 / b * L.cos(2.0 * th / 3.0)
            - 4.0 / (3.0 * b) * L.log(1.0 + 2.0 * L.cos(th / 3.0))
            - 16.0 / (3.0 * b) * L.log(s6) + d)


def _v2_core(z, c_abs, b, d, L):
    ps = _clamped_arccos(-1.0 + c_abs / 2.0 * L.exp(1.5 * z), L)
    inner = 1.0 + 2.0 * L.cos(L.pi / 3.0 + ps / 3.0)
    if abs(float(inner)) < SIN_GUARD:
        return float("-inf")
    return (z / b - 2.0 / b * L.cos(2.0 * L.pi / 3.0 + 2.0 * ps / 3.0)
            - 4.0 / (3.0 * b) * L.log(inner)
            - 16.0 / (3.0 * b) * L.log(L.sin(L.pi / 6.0 + ps / 6.0)) + d)


def _v31_core(z, c_abs, b, d, L):
    ps = _clamped_arccos(-1.0 + c_abs / 2.0 * L.exp(1.5 * z), L)
    inner = -1.0 + 2.0 * L.cos(ps / 3.0)
    if abs(float(inner)) < SIN_GUARD:
        return float("-inf")
    return (z / b - 2.0 / b * L.cos(2.0 * ps / 3.0)
            - 4.0 / (3.0 * b) * L.log(inner)
            - 16.0 / (3.0 * b) * L.log(L.cos(ps / 6.0)) + d)


def _v32_core(z, c_abs, b, d, L):
    e = _clamped_arccosh(-1.0 + c_abs / 2.0 * L.exp(1.5 * z), L)
    return (z / b - 2.0 / b * L.cosh(2.0 * e / 3.0)
            - 16.0 / (3.0 * b) * L.log(L.cosh(e / 6.0))
            - 4.0 / (3.0 * b) * L.log(-1.0 + 2.0 * L.cosh(e / 3.0)) + d)


def _u_plus_printed_core(S, t, c, sigma, b, d, L):
    """Mapped euler_plus solution in its (S, t) shape; equals
    v_plus(log S + sigma^2 t/8) with constant 2c."""
    E = c * S * L.sqrt(S) * L.exp(3.0 * sigma ** 2 * t / 16.0)
    A = 1.0 + E + L.sqrt(2.0 * E + E * E)
    a13 = L.cbrt(A)
    return (-(a13 * a13 + 1.0 / (a13 * a13)) / b
            - 2.0 / b * L.log(a13 + 1.0 / a13 - 2.0) + d)


# -----------------------------------------------------------------------------
# public evaluation (vectorized float + scalar mp)
# -----------------------------------------------------------------------------

_V_CORES = {
    "euler_plus": lambda z, c, b, d, L: _v_plus_core(z, c, b, d, L),
    "trig1": lambda z, c, b, d, L: _v1_core(z, abs(c), b, d, L),
    "trig2": lambda z, c, b, d, L: _v2_core(z, abs(c), b, d, L),
}


def v_plus(z, c: float, b: float, d: float = 0.0):
    """Euler-substitution branch; requires c > 0, defined for all real z."""
    if not c > 0:
        raise ParamError("euler_plus requires c > 0")
    if np.ndim(z):
        return np.array([_v_plus_core(float(zz), c, b, d, NP) for zz in z])
    return _v_plus_core(z, c, b, d, NP) if not _is_mp(z) else \
        _v_plus_core(z, c, b, d, MP)


def vz_plus(z, c: float, b: float):
    """Analytic derivative of ``v_plus``: -(1 + m^2 + m^-2)/b."""
    if not c > 0:
        raise ParamError("euler_plus requires c > 0")
    if np.ndim(z):
        return np.array([_vz_plus_core(float(zz), c, b, NP) for zz in z])
    return _vz_plus_core(z, c, b, NP) if not _is_mp(z) else \
        _vz_plus_core(z, c, b, MP)


def _is_mp(x) -> bool:
    return type(x).__module__.startswith("mpmath")


def _trig_scalar(core, z, c_abs, b, d):
    lib = MP if _is_mp(z) else NP
    zs = z_star(c_abs)
    if float(z) > zs + CLAMP_SLACK:
        raise DomainEnd(f"z = {float(z)} beyond the coincidence point {zs}")
    return core(z, c_abs, b, d, lib)


def v1(z, c_abs: float, b: float, d: float = 0.0):
    """First trigonometric branch, defined on z <= z*."""
    if np.ndim(z):
        return np.array([_trig_scalar(_v1_core, float(zz), c_abs, b, d)
                         for zz in z])
    return _trig_scalar(_v1_core, z, c_abs, b, d)


def v2(z, c_abs: float, b: float, d: float = 0.0):
    """Second trigonometric branch, defined on z <= z*; coincides with v1
    at z*."""
    if np.ndim(z):
        return np.array([_trig_scalar(_v2_core, float(zz), c_abs, b, d)
                         for zz in z])
    return _trig_scalar(_v2_core, z, c_abs, b, d)


def v3(z, c_abs: float, b: float, d: float = 0.0):
    """Third branch: trigonometric piece below z*, hyperbolic above;
    continuous at the junction and defined for all z."""
    def scalar(zz):
        lib = MP if _is_mp(zz) else NP
        if float(zz) <= z_star(c_abs):
            return _v31_core(zz, c_abs, b, d, lib)
        return _v32_core(zz, c_abs, b, d, lib)
    if np.ndim(z):
        return np.array([scalar(float(zz)) for zz in z])
    return scalar(z)


def v_eval(branch: SolutionBranch, z, b: float):
    """Evaluate a catalogue member in invariant coordinates."""
    f = branch.family
    if f == "const":
        return branch.d * (np.ones_like(np.asarray(z, dtype=float))
                           if np.ndim(z) else 1.0)
    if f in ("line_slope_minus3_over_b", "line_slope_1_over_b",
             "const_slope_general_q"):
        if branch.slope is not None:
            slope = branch.slope
        elif f == "line_slope_minus3_over_b":
            slope = -3.0 / b
        elif f == "line_slope_1_over_b":
            slope = 1.0 / b
        else:
            raise ParamError("const_slope_general_q needs an explicit slope")
        return slope * (np.asarray(z) if np.ndim(z) else z) + branch.d
    if f == "euler_plus":
        return v_plus(z, branch.c, b, branch.d)
    if f == "trig1":
        return v1(z, abs(branch.c), b, branch.d)
    if f == "trig2":
        return v2(z, abs(branch.c), b, branch.d)
    if f == "three_piece":
        return v3(z, abs(branch.c), b, branch.d)
    raise ParamError(f"family {f!r} has no v(z) form")


def z_domain(branch: SolutionBranch) -> tuple[float, float]:
    """Open z-interval on which the family is defined."""
    if branch.family in ("trig1", "trig2"):
        return (-math.inf, z_star(branch.c))
    return (-math.inf, math.inf)


def singular_z(branch: SolutionBranch) -> tuple[float, ...]:
    """Interior/boundary z points finite differences must not straddle."""
    if branch.family in TRIG_FAMILIES:
        return (z_star(branch.c),)
    return ()


# -----------------------------------------------------------------------------
# mapped u(S, t) families (k = 1)
# -----------------------------------------------------------------------------

def invariant_z(S, t, sigma: float):
    """z = log S + (sigma^2 / 8) t, the q = 4 invariant coordinate."""
    if np.any(np.asarray(S, dtype=float) <= 0):
        raise DomainError("S must be positive")
    if _is_mp(S) or _is_mp(t):
        return MP.log(S) + sigma ** 2 * t / 8.0
    return np.log(S) + sigma ** 2 * t / 8.0


def wedge_S_max(t, c: float, sigma: float) -> float:
    """Largest S for which (S, t) stays in the trig-family wedge
    z <= z*: S = (4/|c|)^{2/3} exp(-sigma^2 t / 8)."""
    return (4.0 / abs(c)) ** (2.0 / 3.0) * math.exp(-sigma ** 2 * t / 8.0)


def in_wedge(S, t, c: float, sigma: float) -> bool:
    return float(invariant_z(S, t, sigma)) <= z_star(c) + CLAMP_SLACK


def u_families(S, t, family: str, c: float, d: float,
               params: ModelParams):
    """Exact invariant solution u(S, t) of the k = 1 model.

    Only k = 1 admits this catalogue; the invariant speed is pinned to
    a = sigma^2 / 8 (q = 4).  The euler_plus map is evaluated in its native
    (S, t) shape, whose free constant is half the v-side one:
    u(S, t; c) = v_plus(z; 2c).  Trig families evaluate v_i(z) directly and
    raise DomainError outside the wedge z <= z*.
    """
    if params.k != 1.0:
        raise ParamError("mapped catalogue requires k = 1")
    if params.linear_mode:
        raise LinearModeError("mapped catalogue requires rho*omega != 0")
    b, sigma = params.b, params.sigma

    def scalar(Ss, ts):
        lib = MP if (_is_mp(Ss) or _is_mp(ts)) else NP
        if float(Ss) <= 0:
            raise DomainError("S must be positive")
        z = invariant_z(Ss, ts, sigma)
        if family == "euler_plus":
            if not c > 0:
                raise ParamError("euler_plus requires c > 0")
            return _u_plus_printed_core(Ss, ts, c, sigma, b, d, lib)
        if family in TRIG_FAMILIES:
            if not c < 0:
                raise ParamError(f"{family} requires c < 0")
            if family in ("trig1", "trig2") and not in_wedge(Ss, ts, c, sigma):
                raise DomainError(
                    f"(S, t) = ({float(Ss)}, {float(ts)}) outside the wedge")
            core = {"trig1": _v1_core, "trig2": _v2_core}.get(family)
            if core is not None:
                return core(z, abs(c), b, d, lib)
            if float(z) <= z_star(c):
                return _v31_core(z, abs(c), b, d, lib)
            return _v32_core(z, abs(c), b, d, lib)
        if family == "const":
            return d
        if family in ("line_slope_minus3_over_b", "line_slope_1_over_b"):
            slope = -3.0 / b if family == "line_slope_minus3_over_b" else 1.0 / b
            return slope * z + d
        raise ParamError(f"family {family!r} has no mapped form")

    if np.ndim(S) or np.ndim(t):
        Sa, ta = np.broadcast_arrays(np.asarray(S, dtype=float),
                                     np.asarray(t, dtype=float))
        out = np.empty(Sa.shape)
        for idx in np.ndindex(Sa.shape):
            out[idx] = scalar(Sa[idx], ta[idx])
        return out
    return scalar(S, t)


# -----------------------------------------------------------------------------
# constant-slope families and the linear (b = 0) mode
# -----------------------------------------------------------------------------

def constant_slopes(q: float, b: float) -> tuple[float, float]:
    """The two exact constant slopes v_z = (-1 +- sqrt(q)) / b."""
    if q < 0.0:
        raise RegimeError("constant slopes are real only for q >= 0")
    if b == 0.0:
        raise LinearModeError("constant-slope family requires b != 0")
    r = math.sqrt(q)
    return ((-1.0 + r) / b, (-1.0 - r) / b)


def linear_families(q: float, b: float, d: float = 0.0) -> list[SolutionBranch]:
    """Constant and constant-slope catalogue members at the given q.

    At q = 4 the slopes specialize to {0, -3/b, 1/b}; the slope-1/b line is
    the exceptional solution riding the discriminant.
    """
    out = [SolutionBranch("const", d=d, slope=0.0)]
    s_plus, s_minus = constant_slopes(q, b)
    if q == 4.0:
        out.append(SolutionBranch("line_slope_minus3_over_b", d=d, slope=s_minus))
        out.append(SolutionBranch("line_slope_1_over_b", d=d, slope=s_plus))
    else:
        out.append(SolutionBranch("const_slope_general_q", d=d, slope=s_plus))
        out.append(SolutionBranch("const_slope_general_q", d=d, slope=s_minus))
    return out


def linear_mode_solution(z, d1: float, d2: float):
    """General solution d1 + d2 e^{3z/4} of the b = 0 (q = 4) operator."""
    return d1 + d2 * np.exp(0.75 * np.asarray(z)) if np.ndim(z) \
        else d1 + d2 * math.exp(0.75 * z)


def linear_mode_residual(z: float, d1: float, d2: float,
                         sigma: float = 1.0) -> float:
    """Residual of the b = 0 operator a v_z + (sigma^2/2)(v_zz - v_z) on
    the ``linear_mode_solution`` family, with analytic derivatives and
    a = sigma^2/8."""
    w = d2 * math.exp(0.75 * z)
    v_z = 0.75 * w
    v_zz = 0.5625 * w
    a = sigma ** 2 / 8.0
    return a * v_z + sigma ** 2 / 2.0 * (v_zz - v_z)
