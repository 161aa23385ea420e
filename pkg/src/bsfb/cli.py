"""Command-line interface.

    bsfb eval      --config cfg.json | --preset figure2|figure3  [--out path]
    bsfb figure    --preset figure2|figure3                       [--out path]
    bsfb verify    [--out report.json] [--mutate]
    bsfb integrate --config cfg.json                              [--out path]
    bsfb pde       --config cfg.json                              [--out path]

CSV output: comma separated, LF line endings, header row, floats printed
with 17 significant digits; identical configs produce byte-identical files.
Exit codes: 0 success, 2 configuration/domain error, 3 verification
failure, 4 numerical-guard stop.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import closed_form as cf
from . import reduction as rd
from .errors import ConfigError, NumericalGuard, UsageError
from .params import ModelParams, ReducedParams

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VERIFY = 3
EXIT_GUARD = 4


def fmt(x: float) -> str:
    if x != x:
        return "nan"
    return f"{x:.17g}"


@dataclass(frozen=True)
class RunConfig:
    """Parsed run configuration with a canonical serialized form."""

    command: str
    options: dict

    @classmethod
    def from_file(cls, command: str, path: str) -> "RunConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls(command=command, options=data)

    def canonical(self) -> str:
        return json.dumps({"command": self.command, **self.options},
                          sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_canonical(cls, text: str) -> "RunConfig":
        data = json.loads(text)
        command = data.pop("command")
        return cls(command=command, options=data)


def _model_from(options: dict) -> ModelParams:
    m = options.get("model", {})
    try:
        return ModelParams(sigma=float(m.get("sigma", 1.0)),
                           rho=float(m.get("rho", 0.5)),
                           omega=float(m.get("omega", 2.0)),
                           k=float(m.get("k", 1.0)))
    except (TypeError, ValueError, UsageError) as exc:
        raise ConfigError(f"bad model parameters: {exc}") from exc


# -----------------------------------------------------------------------------
# figure presets
# -----------------------------------------------------------------------------

#: preset parameter sets: q = 4, d = 0, b = 1 throughout
PRESETS = {
    "figure2": {"c_abs": 1.0, "z_min": -5.0, "z_max": 4.5, "n": 951},
    "figure3": {"c_abs": 0.5, "S_max": 9.0, "n_S": 180, "t_max": 2.0,
                "n_t": 21},
}


def preset_csv(name: str) -> str:
    """CSV body for a figure preset (deterministic bytes)."""
    if name == "figure2":
        p = PRESETS[name]
        zs = np.linspace(p["z_min"], p["z_max"], p["n"])
        zstar = cf.z_star(p["c_abs"])
        lines = ["family,z,v"]
        for family, c in (("euler_plus", p["c_abs"]),
                          ("trig1", -p["c_abs"]), ("trig2", -p["c_abs"]),
                          ("three_piece", -p["c_abs"])):
            branch = cf.SolutionBranch(family, c=c, d=0.0)
            for z in zs:
                if family in ("trig1", "trig2") and z > zstar:
                    continue
                v = cf.v_eval(branch, float(z), b=1.0)
                if not np.isfinite(v):
                    continue
                lines.append(f"{family},{fmt(float(z))},{fmt(float(v))}")
        return "\n".join(lines) + "\n"
    if name == "figure3":
        p = PRESETS[name]
        model = ModelParams(sigma=1.0, rho=0.5, omega=2.0, k=1.0)  # b = 1
        S_vals = np.arange(1, p["n_S"] + 1) * (p["S_max"] / p["n_S"])
        t_vals = np.linspace(0.0, p["t_max"], p["n_t"])
        lines = ["family,S,t,u"]
        for family, c in (("euler_plus", p["c_abs"]),
                          ("trig1", -p["c_abs"]), ("trig2", -p["c_abs"]),
                          ("three_piece", -p["c_abs"])):
            for t in t_vals:
                for S in S_vals:
                    if family in ("trig1", "trig2") and \
                            not cf.in_wedge(float(S), float(t), c, model.sigma):
                        continue
                    u = cf.u_families(float(S), float(t), family, c, 0.0,
                                      model)
                    if not np.isfinite(u):
                        continue
                    lines.append(f"{family},{fmt(float(S))},{fmt(float(t))},"
                                 f"{fmt(float(u))}")
        return "\n".join(lines) + "\n"
    raise ConfigError(f"unknown preset {name!r}; expected figure2 or figure3")


# -----------------------------------------------------------------------------
# commands
# -----------------------------------------------------------------------------

def cmd_eval(args) -> int:
    if args.preset:
        _write(args.out, preset_csv(args.preset))
        return EXIT_OK
    if not args.config:
        raise ConfigError("eval needs --config or --preset")
    cfg = RunConfig.from_file("eval", args.config)
    opt = cfg.options
    family = opt.get("family")
    if family not in cf.FAMILIES:
        raise ConfigError(f"family must be one of {cf.FAMILIES}, got {family!r}")
    c = float(opt.get("c", 0.0))
    d = float(opt.get("d", 0.0))
    if "z" in opt:
        zspec = opt["z"]
        b = float(opt.get("b", 1.0))
        zs = np.linspace(float(zspec["min"]), float(zspec["max"]),
                         int(zspec["n"]))
        branch = cf.SolutionBranch(family, c=c, d=d,
                                   slope=opt.get("slope"))
        lines = ["z,v"]
        lo, hi = cf.z_domain(branch)
        for z in zs:
            if not (lo < z < hi):
                continue
            v = cf.v_eval(branch, float(z), b=b)
            if np.isfinite(v):
                lines.append(f"{fmt(float(z))},{fmt(float(v))}")
        _write(args.out, "\n".join(lines) + "\n")
        return EXIT_OK
    if "grid" in opt:
        gspec = opt["grid"]
        model = _model_from(opt)
        S_vals = np.linspace(float(gspec["S_min"]), float(gspec["S_max"]),
                             int(gspec["nS"]))
        t_vals = np.linspace(float(gspec.get("t_min", 0.0)),
                             float(gspec["t_max"]), int(gspec["nT"]))
        lines = ["S,t,u"]
        for t in t_vals:
            for S in S_vals:
                if family in ("trig1", "trig2") and \
                        not cf.in_wedge(float(S), float(t), c, model.sigma):
                    continue
                u = cf.u_families(float(S), float(t), family, c, d, model)
                if np.isfinite(u):
                    lines.append(f"{fmt(float(S))},{fmt(float(t))},"
                                 f"{fmt(float(u))}")
        _write(args.out, "\n".join(lines) + "\n")
        return EXIT_OK
    raise ConfigError("eval config needs a 'z' range or a 'grid' block")


def cmd_verify(args) -> int:
    from .verify import report_dict, run_all

    results = run_all(mutate=args.mutate)
    for r in results:
        print(r.line())
    report = report_dict(results, mutated=args.mutate)
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    n_fail = sum(not r.passed for r in results)
    print(f"{len(results) - n_fail}/{len(results)} checks passed")
    return EXIT_OK if n_fail == 0 else EXIT_VERIFY


def cmd_integrate(args) -> int:
    cfg = RunConfig.from_file("integrate", args.config)
    opt = cfg.options
    try:
        params = ReducedParams.from_q(float(opt["q"]), b=float(opt["b"]),
                                      sigma=float(opt.get("sigma", 1.0)),
                                      k=float(opt.get("k", 1.0)))
        branch = (rd.BranchId.minus() if opt.get("branch", "minus") == "minus"
                  else rd.BranchId.plus())
        y0 = float(opt["y0"])
        z0, z1 = (float(v) for v in opt.get("z_span", (0.0, 1.0)))
    except (KeyError, TypeError, ValueError, UsageError) as exc:
        raise ConfigError(f"bad integrate config: {exc}") from exc
    traj = rd.integrate_branch(y0, (z0, z1), branch, params,
                               n_samples=int(opt.get("n", 400)))
    drift = rd.drift_along(traj, params)
    lines = ["z,y,v,first_integral_drift"]
    for z, y, v, dr in zip(traj.zs, traj.ys, traj.vs, drift):
        lines.append(f"{fmt(z)},{fmt(y)},{fmt(v)},{fmt(dr)}")
    if traj.terminated_at:
        lines.append(f"# terminated_at,{traj.terminated_at},,")
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_pde(args) -> int:
    from .pde_solver import GridSpec, convergence_study, solve_validation

    cfg = RunConfig.from_file("pde", args.config)
    opt = cfg.options
    model = _model_from(opt)
    family = opt.get("family", "euler_plus")
    c = float(opt.get("c", 1.0))
    d = float(opt.get("d", 0.0))

    def exact(S, t):
        return np.asarray([cf.u_families(float(s), float(t), family, c, d,
                                         model) for s in np.atleast_1d(S)])

    try:
        grids = [GridSpec(S_min=float(g["S_min"]), S_max=float(g["S_max"]),
                          nS=int(g["nS"]), t_end=float(g["t_end"]),
                          nT=int(g["nT"]))
                 for g in opt["grids"]]
    except (KeyError, TypeError, ValueError, UsageError) as exc:
        raise ConfigError(f"bad pde config: {exc}") from exc
    if opt.get("dump"):
        field = solve_validation(exact, grids[0], model,
                                 direction=opt.get("direction"))
        lines = ["S,t,u"]
        for j, t in enumerate(grids[0].times):
            for i, S in enumerate(grids[0].S):
                lines.append(f"{fmt(float(S))},{fmt(float(t))},"
                             f"{fmt(float(field.values[i, j]))}")
        _write(args.out, "\n".join(lines) + "\n")
        return EXIT_OK
    table = convergence_study(exact, grids, model,
                              direction=opt.get("direction"))
    lines = ["nS,nT,max_error,order_vs_previous"]
    for i, row in enumerate(table.rows):
        order = fmt(table.orders[i - 1]) if 0 < i <= len(table.orders) else ""
        lines.append(f"{row.nS},{row.nT},{fmt(row.max_error)},{order}")
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def _write(out: str | None, text: str):
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bsfb",
        description="Feedback Black-Scholes model: exact solution families, "
                    "branch-ODE integration, verification suite, PDE solver.")
    sub = ap.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate a family to CSV")
    p_eval.add_argument("--config", help="JSON config file")
    p_eval.add_argument("--preset", choices=sorted(PRESETS),
                        help="built-in figure parameter set")
    p_eval.add_argument("--out", help="output path (default stdout)")
    p_eval.set_defaults(fn=cmd_eval)

    p_fig = sub.add_parser("figure", help="emit a figure preset CSV")
    p_fig.add_argument("--preset", required=True, choices=sorted(PRESETS))
    p_fig.add_argument("--out")
    p_fig.set_defaults(fn=cmd_eval, config=None)

    p_ver = sub.add_parser("verify", help="run the acceptance suite")
    p_ver.add_argument("--out", help="write the JSON report here")
    p_ver.add_argument("--mutate", action="store_true",
                       help="inject a 1%% derivative fault (suite must fail)")
    p_ver.set_defaults(fn=cmd_verify)

    p_int = sub.add_parser("integrate", help="integrate a branch ODE to CSV")
    p_int.add_argument("--config", required=True)
    p_int.add_argument("--out")
    p_int.set_defaults(fn=cmd_integrate)

    p_pde = sub.add_parser("pde", help="manufactured-solution PDE runs")
    p_pde.add_argument("--config", required=True)
    p_pde.add_argument("--out")
    p_pde.set_defaults(fn=cmd_pde)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except NumericalGuard as exc:
        print(f"numerical guard stop: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
