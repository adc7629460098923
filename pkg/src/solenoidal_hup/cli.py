"""Command-line front end.

    python -m solenoidal_hup constants --N 3
    python -m solenoidal_hup minimize --N 4 --nu 1 --K-max 30 --tol 1e-6
    python -m solenoidal_hup accept --seed 7

Exit status: 0 success, 2 a verification failed, 1 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import acceptance
from . import fields as F
from .config import COMMANDS, DEFAULT_SEED, FORMATS, RunConfig, UsageError
from .functionals import i_functional, p_beta, q_form
from .galerkin import converge_constant
from .params import (
    DomainError, ProblemParams, best_constant_poloidal, best_constant_solenoidal, constants_row,
)

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2

# tolerance used when --tol is not given
DEFAULT_TOL = {
    "constants": 1e-14, "minimize": 1e-6, "verify-extremal": 1e-6, "oracle3d": 1e-3,
    "identity-check": 1e-8, "sweep": 1e-6, "accept": 1e-6,
}
SWEEP_N = (3, 4, 5, 6)
SWEEP_NU = (1, 2, 3)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--N", type=int, default=3)
    common.add_argument("--nu", type=int, default=1)
    common.add_argument("--K-max", dest="K_max", type=int, default=None)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED)
    common.add_argument("--grid-n", dest="grid_n", type=int, default=48)
    common.add_argument("--box-L", dest="box_L", type=float, default=7.0)
    common.add_argument("--lambda", dest="lam", type=float, default=1.0)
    common.add_argument("--format", dest="output_format", choices=FORMATS, default="json")
    common.add_argument("--out", dest="output_path", default=None)

    parser = _Parser(prog="solenoidal-hup", description=__doc__.splitlines()[0] if __doc__ else None)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "constants": "closed-form constants for one dimension",
        "minimize": "Galerkin convergence table for (N, nu)",
        "verify-extremal": "quotient of the poloidal extremal via the 1D reduction",
        "oracle3d": "toroidal extremal quotient by 3D tensor quadrature",
        "identity-check": "I = Q + P1 - c P0 on a seeded random family",
        "sweep": "Galerkin constants over N = 3..6, nu = 1..3",
        "accept": "run all acceptance criteria",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    opts = vars(ns)
    if opts["tol"] is None:
        opts["tol"] = DEFAULT_TOL[ns.command]
    if opts["K_max"] is None:
        opts["K_max"] = 25 if ns.command == "sweep" else 30
    return RunConfig(**opts).validate()


def _constants(cfg):
    row = constants_row(cfg.N)
    ok = (row["unconstrained"] < row["solenoidal"] <= row["curl_free"]
          and abs(row["solenoidal"] - min(row["poloidal"], row["toroidal"])) <= cfg.tol * row["solenoidal"])
    row["passed"] = bool(ok)
    return {"command": "constants", "rows": [row], "passed": bool(ok)}


def _minimize(cfg):
    p = ProblemParams(cfg.N, cfg.nu)
    table = converge_constant(p, cfg.K_max, cfg.tol)
    rows = []
    for r in table.rows:
        rows.append({"n": cfg.N, "nu": cfg.nu, "k": r["K"], "lambda_min": r["lambda_min"],
                     "c_theory": p.c, "gap": r["gap"], "quotient": r["lambda_min_sq"],
                     "tol": cfg.tol, "passed": bool(r["gap"] >= -1e-12)})
    floor_ok = all(lam >= p.c - 1e-12 for lam in table.raw)
    return {"command": "minimize", "rows": rows, "converged": table.converged,
            "c_squared": best_constant_poloidal(cfg.N, cfg.nu),
            "passed": bool(table.converged and floor_ok)}


def _verify_extremal(cfg):
    p = ProblemParams(cfg.N, 1)
    rep = F.quotient_poloidal_1d(p, cfg.lam)
    target = best_constant_solenoidal(cfg.N)
    gap = rep.quotient - target
    ok = abs(gap) <= cfg.tol * target
    row = {"n": cfg.N, "nu": 1, "lambda": cfg.lam, "quotient": rep.quotient, "c_theory": target,
           "gap": gap, "tol": cfg.tol, "passed": bool(ok)}
    out = {"command": "verify-extremal", "rows": [row], "report": rep.as_dict()}
    if cfg.N == 3:
        fld = F.PoloidalExtremal(3, (0.0, 0.0, 1.0), cfg.lam)
        checks = []
        for r in (0.5, 1.0, 2.0):
            lhs, rhs = F.sphere_reduction_check(fld, r)
            checks.append({"r": r, "lhs": lhs, "rhs": rhs, "rel_err": abs(lhs - rhs) / rhs})
        ok = ok and all(c["rel_err"] <= 1e-10 for c in checks)
        out["sphere_check"] = checks
    out["passed"] = bool(ok)
    return out


def _oracle3d(cfg):
    rep = F.quotient_toroidal_3d(F.ToroidalExtremal((1.0, 0.0, 0.0), 0.5), cfg.grid_n, cfg.box_L)
    gap = rep.quotient - 6.25
    ok = abs(gap) <= cfg.tol and not rep.flagged
    row = {"n": 3, "quotient": rep.quotient, "c_theory": 6.25, "gap": gap, "tol": cfg.tol,
           "grid_n": cfg.grid_n, "box_l": cfg.box_L, "richardson_diff": rep.meta["richardson_diff"],
           "integral_grad": rep.integral_grad, "integral_weighted": rep.integral_weighted,
           "integral_l2": rep.integral_l2, "passed": bool(ok)}
    return {"command": "oracle3d", "rows": [row], "passed": bool(ok)}


def _identity_check(cfg):
    params, profiles = acceptance.random_family(cfg.seed)
    rows = []
    for p in params:
        worst = 0.0
        for g in profiles:
            i_val = i_functional(g, p)
            rhs = q_form(g, p) + p_beta(g, p, 1) - p.c * p_beta(g, p, 0)
            worst = max(worst, abs(i_val - rhs) / (1 + abs(i_val)))
        rows.append({"mu": p.mu, "eps": p.eps, "c_theory": p.c, "profiles": len(profiles),
                     "gap": worst, "tol": cfg.tol, "passed": bool(worst <= cfg.tol)})
    return {"command": "identity-check", "seed": cfg.seed, "rows": rows,
            "passed": all(r["passed"] for r in rows)}


def _sweep(cfg):
    rows = []
    for N in SWEEP_N:
        for nu in SWEEP_NU:
            p = ProblemParams(N, nu)
            table = converge_constant(p, cfg.K_max, 0.0, ks=[cfg.K_max], stop_early=False)
            lam = table.raw[-1]
            gap = lam - p.c
            rows.append({"n": N, "nu": nu, "k": cfg.K_max, "lambda_min": lam, "c_theory": p.c,
                         "gap": gap, "quotient": lam * lam, "tol": cfg.tol,
                         "passed": bool(-1e-12 <= gap <= cfg.tol)})
    return {"command": "sweep", "rows": rows, "passed": all(r["passed"] for r in rows)}


def _accept(cfg, log=None):
    results = []
    for n, *_ in acceptance.CRITERIA:
        res = acceptance.run_criterion(n, cfg.seed)
        if log is not None:
            print(res.line(), file=log)
        results.append(res)
    out = acceptance.summary(results, cfg.seed)
    out["command"] = "accept"
    out["rows"] = [{"id": r.number, "name": r.name, "passed": r.passed} for r in results]
    return out


HANDLERS = {
    "constants": _constants, "minimize": _minimize, "verify-extremal": _verify_extremal,
    "oracle3d": _oracle3d, "identity-check": _identity_check, "sweep": _sweep,
}


def execute(cfg: RunConfig, log=None) -> dict:
    if cfg.command == "accept":
        return _accept(cfg, log)
    return HANDLERS[cfg.command](cfg)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    rows = report.get("rows", [])
    if fmt == "csv":
        cols = []
        for r in rows:
            cols += [k for k in r if k not in cols]
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
        return buf.getvalue()
    lines = [f"{report['command']}: {'PASSED' if report['passed'] else 'FAILED'}"]
    for r in rows:
        lines.append("  " + "  ".join(f"{k}={v:.12g}" if isinstance(v, float) else f"{k}={v}"
                                      for k, v in r.items()))
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        # --help exits 0 through argparse
        return int(exc.code or 0)
    try:
        report = execute(cfg, log=sys.stderr if cfg.command == "accept" else None)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(report, cfg.output_format)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report["passed"] else EXIT_FAILED



if __name__ == "__main__":
    sys.exit(main())
