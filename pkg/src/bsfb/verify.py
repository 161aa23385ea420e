"""Acceptance suite: every catalogue formula checked by an independent oracle.

Each check returns a CheckResult with the worst observed value against its
pinned threshold.  The checks are pure and deterministic; the CLI ``verify``
command and the acceptance tests both drive this module.

``derivative_scale`` is a fault-injection knob for the two residual checks:
scaling the finite-difference derivatives by 1.01 must produce residual
breaches, demonstrating the sweeps actually constrain the formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from . import closed_form as cf
from . import reduction as rd
from .errors import DomainEnd
from .fd import richardson_d1, richardson_d2
from .model import residual_sweep
from .params import GroupElement, ModelParams, ReducedParams
from .symmetry import (
    expected_bracket,
    generators,
    lie_bracket,
    surface_residual,
    transport_surface,
)

#: model bundle shared by the q = 4 checks: sigma = 1, b = rho*omega = 1, k = 1
MODEL = ModelParams(sigma=1.0, rho=0.5, omega=2.0, k=1.0)
REDUCED = ReducedParams.from_q(4.0, b=1.0, sigma=1.0)

#: end-band excluded from residual sweeps at each z-domain endpoint
END_BAND = 1e-3


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    threshold: float
    comparison: str = "<"
    detail: str = ""

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return (f"[{mark}] {self.name}: {self.value:.3e} "
                f"{self.comparison} {self.threshold:.1e}  {self.detail}")


def _result(name, value, threshold, detail="", comparison="<"):
    ok = value < threshold if comparison == "<" else value > threshold
    return CheckResult(name=name, passed=bool(ok), value=float(value),
                       threshold=float(threshold), comparison=comparison,
                       detail=detail)


# -----------------------------------------------------------------------------
# 1. reduced-ODE residuals of the q = 4 catalogue
# -----------------------------------------------------------------------------

def _ode_residual_sweep(v_fn, z_lo, z_hi, params, *, bounds=(None, None),
                        n=150, dps=30, h_base=1e-5, derivative_scale=1.0):
    worst = 0.0
    with mp.workdps(dps):
        for z in np.linspace(z_lo, z_hi, n):
            mz = mp.mpf(z)
            h = h_base * max(1.0, abs(z))
            lo, hi = bounds
            if lo is not None:
                h = min(h, 0.3 * (z - lo))
            if hi is not None:
                h = min(h, 0.3 * (hi - z))
            vz = richardson_d1(v_fn, mz, mp.mpf(h)) * derivative_scale
            vzz = richardson_d2(v_fn, mz, mp.mpf(h)) * derivative_scale
            res = rd.reduced_ode_residual(v_fn(mz), vz, vzz, params)
            worst = max(worst, abs(float(res)))
    return worst


def q4_family_sweeps(c_abs: float = 1.0, b: float = 1.0, d: float = 0.0,
                     derivative_scale: float = 1.0) -> dict[str, float]:
    """Max |reduced residual| per q = 4 family over its stated z-domain,
    end bands of width END_BAND excluded, derivatives by extended-precision
    Richardson differences."""
    zs = cf.z_star(c_abs)
    lo, hi = -5.0, 4.5
    out = {}
    out["euler_plus"] = _ode_residual_sweep(
        lambda z: cf.v_plus(z, c_abs, b, d), lo + END_BAND, hi - END_BAND,
        REDUCED, derivative_scale=derivative_scale)
    out["trig1"] = _ode_residual_sweep(
        lambda z: cf.v1(z, c_abs, b, d), lo + END_BAND, zs - END_BAND,
        REDUCED, bounds=(None, zs), derivative_scale=derivative_scale)
    out["trig2"] = _ode_residual_sweep(
        lambda z: cf.v2(z, c_abs, b, d), lo + END_BAND, zs - END_BAND,
        REDUCED, bounds=(None, zs), derivative_scale=derivative_scale)
    out["three_piece_lower"] = _ode_residual_sweep(
        lambda z: cf.v3(z, c_abs, b, d), lo + END_BAND, zs - END_BAND,
        REDUCED, bounds=(None, zs), derivative_scale=derivative_scale)
    out["three_piece_upper"] = _ode_residual_sweep(
        lambda z: cf.v3(z, c_abs, b, d), zs + END_BAND, hi - END_BAND,
        REDUCED, bounds=(zs, None), derivative_scale=derivative_scale)
    return out


def check_ode_residuals(derivative_scale: float = 1.0) -> CheckResult:
    sweeps = q4_family_sweeps(derivative_scale=derivative_scale)
    worst_family = max(sweeps, key=sweeps.get)
    return _result("closed-form reduced-ODE residuals", max(sweeps.values()),
                   1e-8, detail=f"worst family: {worst_family}")


# -----------------------------------------------------------------------------
# 2. PDE residuals of the mapped families
# -----------------------------------------------------------------------------

def check_pde_residuals(derivative_scale: float = 1.0) -> CheckResult:
    worst = 0.0
    worst_family = ""
    zs = cf.z_star(1.0)
    grids = {
        "euler_plus": (np.geomspace(0.4, 5.0, 50), np.linspace(0.0, 2.0, 20),
                       1.0, None),
        "trig1": (np.geomspace(0.2, 1.8, 50), np.linspace(0.0, 2.0, 20),
                  -1.0, "upper"),
        "trig2": (np.geomspace(0.2, 1.8, 50), np.linspace(0.0, 2.0, 20),
                  -1.0, "upper"),
        "three_piece": (np.geomspace(0.4, 5.0, 50), np.linspace(0.0, 2.0, 20),
                        -1.0, "both"),
    }
    for fam, (S_vals, t_vals, c, edge) in grids.items():
        def u_fn(S, t, fam=fam, c=c):
            return cf.u_families(S, t, fam, c, 0.0, MODEL)

        def valid(S, t):
            z = math.log(S) + MODEL.sigma ** 2 * t / 8.0
            if edge is None:
                return True
            return abs(z - zs) > END_BAND if edge == "both" else z < zs - END_BAND

        def z_bounds(S, t):
            z = math.log(S) + MODEL.sigma ** 2 * t / 8.0
            if edge is None:
                return (math.inf, math.inf)
            if edge == "upper" or z < zs:
                return (math.inf, zs - z)
            return (z - zs, math.inf)

        rep = residual_sweep(u_fn, S_vals, t_vals, MODEL, valid=valid,
                             z_bounds_of=z_bounds,
                             derivative_scale=derivative_scale,
                             domain_note=fam)
        if rep.max_abs > worst:
            worst, worst_family = rep.max_abs, fam
    return _result("mapped-family PDE residuals", worst, 1e-6,
                   detail=f"worst family: {worst_family}")


# -----------------------------------------------------------------------------
# 3. trig coincidence point
# -----------------------------------------------------------------------------

def check_coincidence() -> CheckResult:
    zs = cf.z_star(1.0)
    gap = abs(cf.v1(zs, 1.0, 1.0) - cf.v2(zs, 1.0, 1.0))
    raised = 0
    for f in (cf.v1, cf.v2):
        try:
            f(zs + 1e-6, 1.0, 1.0)
        except DomainEnd:
            raised += 1
    expected = 4.0 / 3.0 * math.log(2.0)  # z* at |c| = 1
    ok = gap < 1e-9 and raised == 2 and abs(zs - expected) < 1e-12
    detail = (f"z* = {zs:.6f} (= (4/3)ln2 = {expected:.6f}); "
              f"DomainEnd past z*: {raised}/2")
    return CheckResult(name="trig1/trig2 coincidence at z*", passed=ok,
                       value=float(gap), threshold=1e-9, detail=detail)


# -----------------------------------------------------------------------------
# 4. exceptional solution exists iff q = 4
# -----------------------------------------------------------------------------

def check_exceptional() -> CheckResult:
    at4 = rd.exceptional_residual(ReducedParams.from_q(4.0, b=1.0))
    off = min(rd.exceptional_residual(ReducedParams.from_q(q, b=1.0))
              for q in (3.9, 4.1))
    ok = at4 < 1e-12 and off > 1e-3
    return CheckResult(
        name="exceptional solution iff q = 4", passed=ok, value=at4,
        threshold=1e-12,
        detail=f"off-q residual min {off:.3e} (> 1e-3 required)")


# -----------------------------------------------------------------------------
# 5. branch integration matches the euler_plus derivative
# -----------------------------------------------------------------------------

def check_oracle_equivalence() -> CheckResult:
    y0 = cf.vz_plus(0.0, 1.0, 1.0)
    traj = rd.integrate_branch(y0, (0.0, 2.0), rd.BranchId.minus(), REDUCED)
    err = float(np.max(np.abs(traj.ys - cf.vz_plus(traj.zs, 1.0, 1.0))))
    return _result("branch ODE vs euler_plus derivative", err, 1e-6,
                   detail="q=4, minus branch, z in [0,2]")


# -----------------------------------------------------------------------------
# 6. first integrals constant along trajectories
# -----------------------------------------------------------------------------

def check_first_integrals() -> CheckResult:
    cases = [(2.0, -3.0), (1.0, -3.0), (-1.0, 2.0)]
    worst = 0.0
    worst_case = ""
    for q, y0 in cases:
        params = ReducedParams.from_q(q, b=1.0)
        for branch in (rd.BranchId.minus(), rd.BranchId.plus()):
            traj = rd.integrate_branch(y0, (0.0, 0.5), branch, params,
                                       n_samples=60)
            drift = rd.drift_along(traj, params)
            drift = drift[np.isfinite(drift)]
            spread = float(np.max(drift) - np.min(drift))
            if spread > worst:
                worst = spread
                worst_case = f"q={q}, {branch.sign.value}"
    return _result("first integrals along trajectories", worst, 1e-6,
                   detail=f"worst: {worst_case}")


# -----------------------------------------------------------------------------
# 7. symmetry: bracket table and solution transport
# -----------------------------------------------------------------------------

def check_brackets() -> CheckResult:
    rng = np.random.default_rng(7)
    worst = 0.0
    for k in (0.0, 1.0, 2.0, -0.5):
        gens = generators(k=k, special=True)
        pts = np.column_stack([rng.uniform(0.2, 5.0, 100),
                               rng.uniform(-2.0, 2.0, 100),
                               rng.uniform(-3.0, 3.0, 100)])
        for i in range(4):
            for j in range(i + 1, 4):
                br = lie_bracket(gens[i], gens[j])
                want = expected_bracket(i + 1, j + 1, k)
                for S, t, u in pts[:25]:
                    got = np.array(br.coeffs(S, t, u))
                    if want is None:
                        ref = np.zeros(3)
                    else:
                        scale, idx = want
                        ref = scale * np.array(gens[idx - 1].coeffs(S, t, u))
                    worst = max(worst, float(np.max(np.abs(got - ref))))
    return _result("bracket table", worst, 1e-7,
                   detail="k in {0, 1, 2, -0.5}, 25 points per pair")


def check_transport() -> CheckResult:
    S = np.geomspace(0.5, 4.0, 120)
    t = np.linspace(0.0, 1.0, 60)
    U = cf.u_families(S[:, None], t[None, :], "euler_plus", 0.5, 0.0, MODEL)
    elements = [
        (GroupElement(epsilon=1.0, a1=0.3, a2=0.2, a3=0.1, a4=0.5), True),
        (GroupElement(epsilon=-0.8, a1=-0.4, a2=0.1, a3=0.2, a4=-0.3), True),
        (GroupElement(epsilon=1.0, a2=0.5, a3=0.7, a4=1.1), False),
    ]
    worst = 0.0
    for g, special in elements:
        S2, t2, U2 = transport_surface(S, t, U, g, k=1.0, special=special)
        rep = surface_residual(S2, t2, U2, MODEL)
        worst = max(worst, rep.max_abs)
    return _result("group-transported solutions stay solutions", worst, 1e-5,
                   detail="3 group elements, |eps| <= 1")


# -----------------------------------------------------------------------------
# 8. uniformization and local expansions
# -----------------------------------------------------------------------------

def check_uniformization() -> CheckResult:
    rng = np.random.default_rng(8)
    worst = 0.0
    for q, b in ((4.0, 1.0), (2.0, 1.0), (1.0, 1.0), (-1.0, 1.0), (2.0, -0.7)):
        params = ReducedParams.from_q(q, b=b)
        ps = rng.uniform(-3.0, 3.0, 200)
        ps = ps[np.abs(ps + 1.0) > 1e-3]
        for p in ps:
            zeta, w = rd.uniformize(p, params)
            worst = max(worst, abs(rd.curve_polynomial(zeta, w, params)))
    return _result("uniformization satisfies the curve", worst, 1e-10,
                   detail="1000 chart values over 5 (q, b) bundles")


def check_expansions() -> CheckResult:
    worst_dev = 0.0
    cases = [(2.0, 1.0, rd.Sheet.PRINCIPAL), (2.0, 1.0, rd.Sheet.SECOND),
             (1.0, 1.0, rd.Sheet.SECOND), (3.0, -1.5, rd.Sheet.SECOND)]
    for q, b, sheet in cases:
        params = ReducedParams.from_q(q, b=b)
        for zeta in (1e-4, 1e-5, 1e-6):
            ratio = (rd.curve_eval(zeta, sheet, params)
                     / rd.sheet_expansion_zero(zeta, sheet, params))
            worst_dev = max(worst_dev, abs(float(ratio) - 1.0))
    return _result("local expansions match the curve near zeta = 0",
                   worst_dev, 0.02, detail="decade sweep, ratio -> 1")


# -----------------------------------------------------------------------------
# 9. sheet involution
# -----------------------------------------------------------------------------

def check_involution() -> CheckResult:
    rng = np.random.default_rng(9)
    worst = 0.0
    for p in rng.uniform(-4.0, 4.0, 100):
        worst = max(worst, abs(cf.cubic_lhs(p, "cubm")
                               + cf.cubic_lhs(-p, "cubp")))
    return _result("involution maps cubm to cubp", worst, 1e-12,
                   detail="(p, c) -> (-p, -c), 100 random points")


# -----------------------------------------------------------------------------
# 10. linear (b = 0) mode
# -----------------------------------------------------------------------------

def check_linear_mode() -> CheckResult:
    worst = 0.0
    for d1, d2 in ((0.0, 1.0), (2.5, -1.3), (-7.0, 0.25)):
        for z in np.linspace(-4.0, 4.0, 41):
            worst = max(worst, abs(cf.linear_mode_residual(z, d1, d2)))
    return _result("b = 0 operator annihilates d1 + d2 e^{3z/4}", worst,
                   1e-12)


# -----------------------------------------------------------------------------
# 11. manufactured-solution convergence
# -----------------------------------------------------------------------------

def check_convergence() -> CheckResult:
    from .pde_solver import GridSpec, convergence_study

    def exact(S, t):
        return cf.v_plus(np.log(S) + MODEL.sigma ** 2 * t / 8.0, 1.0, MODEL.b)

    specs = [GridSpec(S_min=0.5, S_max=4.0, nS=n, t_end=1.0, nT=n)
             for n in (64, 128, 256)]
    table = convergence_study(exact, specs, MODEL)
    errs = ", ".join(f"{r.nS}->{r.max_error:.2e}" for r in table.rows)
    return _result("manufactured euler_plus spatial order",
                   table.observed_order, 1.8, comparison=">",
                   detail=errs)


# -----------------------------------------------------------------------------
# 12. blow-up scaling as rho -> 0
# -----------------------------------------------------------------------------

def check_blowup() -> CheckResult:
    vals = {}
    for rho in (1e-2, 1e-3):
        m = ModelParams(sigma=1.0, rho=rho, omega=1.0, k=1.0)
        vals[rho] = cf.u_families(2.0, 0.5, "euler_plus", 1.0, 0.0, m)
    ratio = abs(vals[1e-3]) / abs(vals[1e-2])
    return _result("1/rho blow-up of mapped solutions", abs(ratio - 10.0),
                   0.1, detail=f"|u(1e-3)|/|u(1e-2)| = {ratio:.6f}")


# -----------------------------------------------------------------------------
# 13. figure presets
# -----------------------------------------------------------------------------

def check_presets() -> CheckResult:
    from .cli import preset_csv

    ok = True
    details = []
    for name in ("figure2", "figure3"):
        a = preset_csv(name)
        b2 = preset_csv(name)
        same = a == b2
        ok = ok and same
        details.append(f"{name}: {len(a.splitlines())} rows"
                       + ("" if same else " NON-DETERMINISTIC"))
    return CheckResult(name="figure presets deterministic", passed=ok,
                       value=0.0 if ok else 1.0, threshold=1.0,
                       detail="; ".join(details))


# -----------------------------------------------------------------------------
# suite driver
# -----------------------------------------------------------------------------

ALL_CHECKS = (
    check_ode_residuals,
    check_pde_residuals,
    check_coincidence,
    check_exceptional,
    check_oracle_equivalence,
    check_first_integrals,
    check_brackets,
    check_transport,
    check_uniformization,
    check_expansions,
    check_involution,
    check_linear_mode,
    check_convergence,
    check_blowup,
    check_presets,
)


def run_all(mutate: bool = False) -> list[CheckResult]:
    """Run the acceptance suite; ``mutate`` injects a 1% derivative-scale
    fault into the residual sweeps (they must then fail)."""
    scale = 1.01 if mutate else 1.0
    results = []
    for fn in ALL_CHECKS:
        if fn in (check_ode_residuals, check_pde_residuals):
            results.append(fn(derivative_scale=scale))
        else:
            results.append(fn())
    return results


def report_dict(results: list[CheckResult], mutated: bool = False) -> dict:
    return {
        "schema": "bsfb-verify-report/1",
        "mutated": mutated,
        "all_passed": all(r.passed for r in results),
        "checks": [
            {"name": r.name, "passed": r.passed, "value": r.value,
             "threshold": r.threshold, "comparison": r.comparison,
             "detail": r.detail}
            for r in results
        ],
    }
