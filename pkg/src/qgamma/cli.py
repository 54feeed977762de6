"""``qgamma`` command-line interface.

Exit codes: 0 success, 1 a check or audit failed, 2 usage, parse or shape
error, 3 infeasible constraints, 4 solver hit its iteration cap (the partial
result is still written).
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import warnings

from . import io
from .algebra import random_state
from .checks import AUDIT_KINDS, SUITES, run_audit, run_suite
from .config import tolerances
from .divergence import divergence, divergence_sweep, parse_gamma_range
from .errors import Infeasible, MaxIterationsWarning, QGammaError
from .projection import bregman_project
from .quasientropy import quasi_entropy_gamma

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_MAXITER = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _gamma(text: str) -> float:
    try:
        g = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= g <= 1.0:
        raise argparse.ArgumentTypeError(f"gamma must lie in [0, 1], got {g}")
    return g


def _nonneg(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"tolerance must be >= 0, got {v}")
    return v


def _load_states(*paths):
    states = [io.state_from_json(io.load_json(p)) for p in paths]
    if any(s.shape != states[0].shape for s in states):
        raise UsageError(f"shapes differ: {', '.join(str(list(s.shape)) for s in states)}")
    return states


def cmd_div(args) -> int:
    omega, phi = _load_states(args.omega, args.phi)
    print(io.format_value(divergence(omega, phi, args.gamma)))
    return EXIT_OK


def cmd_quasi(args) -> int:
    if not 0.0 < args.gamma < 1.0:
        raise UsageError("quasi needs gamma in (0, 1)")
    omega, phi = _load_states(args.omega, args.phi)
    print(io.format_value(quasi_entropy_gamma(omega, phi, args.gamma)))
    return EXIT_OK


def cmd_sweep(args) -> int:
    gammas = parse_gamma_range(args.range)
    omega, phi = _load_states(args.omega, args.phi)
    rows = divergence_sweep(omega, phi, gammas)
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["gamma", "divergence"])
        for g, d in rows:
            w.writerow([f"{g:.9g}", io.format_value(d)])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_project(args) -> int:
    (psi,) = _load_states(args.psi)
    C = io.constraints_from_json(io.load_json(args.constraints), gamma=args.gamma)
    if C.shape != psi.shape:
        raise UsageError(f"constraint shape {list(C.shape)} differs from state shape {list(psi.shape)}")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", MaxIterationsWarning)
            res = bregman_project(psi, C, max_iter=args.max_iter, seed=args.seed)
    except Infeasible as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    payload = io.projection_to_json(res)
    if args.out:
        io.dump_json(payload, args.out)
    else:
        print(io.json.dumps(payload, indent=1))
    if not res.converged:
        print(f"not converged after {res.iterations} iterations (kkt residual {res.kkt_residual:.3e})",
              file=sys.stderr)
        return EXIT_MAXITER
    return EXIT_OK


def cmd_audit(args) -> int:
    if args.trials < 1 or args.dim < 1:
        raise UsageError("--trials and --dim must be >= 1")
    if not 0.0 < args.gamma < 1.0:
        raise UsageError("audit needs gamma in (0, 1)")
    r = run_audit(args.kind, args.trials, args.dim, seed=args.seed, gamma=args.gamma)
    status = "PASS" if r.passed else "FAIL"
    print(f"{r.kind}: trials={r.trials} dim={args.dim} gamma={args.gamma:g} seed={args.seed} "
          f"worst={r.worst:.3e} tol={r.tolerance:.1e} {status}")
    if not r.passed:
        print(f"offending trial index {r.worst_trial} (seed {args.seed})")
        return EXIT_FAIL
    return EXIT_OK


def cmd_gen(args) -> int:
    shape = [int(d) for d in args.shape.split(",")]
    rho = random_state(shape, args.seed, normalized=not args.unnormalized, rank=args.rank)
    payload = io.element_to_json(rho)
    if args.out:
        io.dump_json(payload, args.out)
    else:
        print(io.json.dumps(payload, indent=1))
    return EXIT_OK


def cmd_check(args) -> int:
    results = run_suite(args.suite, seed=args.seed)
    width = max(len(r.name) for r in results)
    print(f"{'criterion':<{width}}  status  worst residual  tolerance")
    for r in results:
        print(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL':<6}  {r.worst:<14.3e}  {r.tolerance:.1e}")
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"first failing criterion: {failed[0].name} ({failed[0].detail})")
        return EXIT_FAIL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qgamma", description="gamma-family quantum relative entropies")
    p.add_argument("--psd-tol", type=_nonneg, help="override QGAMMA_PSD_TOL")
    p.add_argument("--solver-tol", type=_nonneg, help="override QGAMMA_SOLVER_TOL")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("div", help="print D_gamma(omega, phi)")
    s.add_argument("omega")
    s.add_argument("phi")
    s.add_argument("--gamma", type=_gamma, required=True)
    s.set_defaults(func=cmd_div)

    s = sub.add_parser("quasi", help="print the Petz quasi-entropy with f_gamma")
    s.add_argument("omega")
    s.add_argument("phi")
    s.add_argument("--gamma", type=_gamma, required=True)
    s.set_defaults(func=cmd_quasi)

    s = sub.add_parser("sweep", help="write gamma,divergence rows over a range")
    s.add_argument("omega")
    s.add_argument("phi")
    s.add_argument("--range", required=True, help="a:b:step, inclusive of b when on the grid")
    s.add_argument("--out", help="CSV path (default stdout)")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("project", help="Bregman projection onto affine constraints")
    s.add_argument("psi")
    s.add_argument("constraints")
    s.add_argument("--gamma", type=_gamma, help="override the gamma stored in the constraint file")
    s.add_argument("--out", help="JSON path (default stdout)")
    s.add_argument("--max-iter", type=int, default=10000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_project)

    s = sub.add_parser("audit", help="randomized property audit")
    s.add_argument("--kind", choices=sorted(AUDIT_KINDS), required=True)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--dim", type=int, default=3)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--gamma", type=_gamma, default=0.5)
    s.set_defaults(func=cmd_audit)

    s = sub.add_parser("gen", help="write a random state")
    s.add_argument("--shape", required=True, help="comma-separated block sizes, e.g. 2,1")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--rank", type=int)
    s.add_argument("--unnormalized", action="store_true")
    s.add_argument("--out", help="JSON path (default stdout)")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("check", help="run the acceptance suite")
    s.add_argument("--suite", choices=SUITES, default="all")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.psd_tol is not None:
        os.environ["QGAMMA_PSD_TOL"] = repr(args.psd_tol)
    if args.solver_tol is not None:
        os.environ["QGAMMA_SOLVER_TOL"] = repr(args.solver_tol)
    try:
        tolerances()
        return args.func(args)
    except (UsageError, ValueError, TypeError, KeyError, OSError, QGammaError) as e:
        print(f"qgamma {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
