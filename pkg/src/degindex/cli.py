"""Command-line front end.

Subcommands:
  degree       Brouwer degree of the boundary-determinant map over a rectangle
  morse        Morse index via the strip winding, with conjugate points
  sf           spectral flow of the shifted family along t in [0, 1]
  conjugates   conjugate-point scan with multiplicities
  rd-analyze   closed-form analysis of a planar constant problem
  verify       run every computation on a problem and cross-check the counts

All subcommands read a problem JSON file and write result.json (deterministic:
schema-tagged, no timestamps) plus optional CSV traces to --out.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import PlanarConstantProblem, lambda_pm_linearization
from .degree import degree_index
from .errors import (BoundaryZeroError, DegenerateOperatorError,
                     DegenerateThresholdError, DegindexError,
                     NotAConjugatePointError, TuringConditionError,
                     ValidationError)
from .morse import morse_via_degree, scan_conjugate_points
from .oracle import morse_index, spectral_flow
from .problem import Rectangle, load_problem, validate
from .rd import (conjugate_sets, count_negative_eigenvalues,
                 degree_equals_negative_count, turing_report)

PRECONDITION_ERRORS = (ValidationError, DegenerateOperatorError,
                       BoundaryZeroError, TuringConditionError,
                       DegenerateThresholdError, NotAConjugatePointError)


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _write_result(out_dir: Path, payload: dict, fmt: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {"schema_version": 1, **payload}
    (out_dir / "result.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")
    if fmt == "csv":
        rows = [(k, v) for k, v in sorted(payload.items())
                if isinstance(v, (int, float, str, bool))]
        (out_dir / "result.csv").write_text(
            "key,value\n" + "\n".join(f"{k},{v}" for k, v in rows) + "\n")


def _load(args):
    spec, extras = load_problem(args.problem)
    return spec, extras


def _rectangle(args, spec, extras):
    if args.rect is not None:
        t0, t1, s0, s1 = args.rect
        return Rectangle(t0, t1, s0, s1)
    if extras.get("rectangle") is not None:
        return extras["rectangle"]
    return None


def _planar(spec) -> PlanarConstantProblem:
    if spec.n != 2 or not spec.is_constant:
        raise ValidationError("closed-form analysis needs a constant 2x2 problem")
    p = spec.p(0.0)
    if abs(p[0, 0] - 1.0) > 1e-12 or abs(p[0, 1]) > 1e-12 or abs(p[1, 0]) > 1e-12:
        raise ValidationError("closed-form analysis needs P = diag(1, d)")
    v = -(spec.s(0.0) + spec.c0(0.0))
    return PlanarConstantProblem(float(p[1, 1]), v, spec.length)


def cmd_degree(args) -> dict:
    spec, extras = _load(args)
    result = degree_index(spec, _rectangle(args, spec, extras),
                          localize=args.localize, steps=args.steps,
                          samples_per_edge=args.samples)
    if args.out and args.trace:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        result.trace.to_csv(Path(args.out) / "trace.csv")
    return {"command": "degree", **result.to_dict()}


def cmd_morse(args) -> dict:
    spec, _ = _load(args)
    rep = morse_via_degree(spec, delta=args.delta, strip_height=args.strip_height,
                           steps=args.steps, samples_per_edge=args.samples)
    return {"command": "morse", **rep.to_dict()}


def cmd_sf(args) -> dict:
    spec, _ = _load(args)
    ledger = spectral_flow(spec, path_steps=args.path_steps, m=args.grid_m)
    if args.out and args.trace:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        ledger.to_csv(Path(args.out) / "trajectories.csv")
    return {
        "command": "sf",
        "spectral_flow": ledger.net,
        "crossings": [{"t": e.t, "imag": e.imag, "direction": e.direction}
                      for e in ledger.events],
    }


def cmd_conjugates(args) -> dict:
    spec, _ = _load(args)
    points = scan_conjugate_points(spec, samples=args.samples)
    return {
        "command": "conjugates",
        "conjugate_points": [{"x": p.x, "multiplicity": p.multiplicity}
                             for p in points],
    }


def cmd_rd_analyze(args) -> dict:
    spec, _ = _load(args)
    prob = _planar(spec)
    rep = turing_report(prob)
    payload = {
        "command": "rd-analyze",
        "d": prob.d,
        "tr_v": prob.tr_v,
        "det_v": prob.det_v,
        "m_weight": prob.m_weight,
        "disc1": prob.disc1,
        "disc2": prob.disc2,
        "instability_conditions": {
            "tr_negative": rep.tr_negative,
            "det_positive": rep.det_positive,
            "weight_exceeds_threshold": rep.weight_exceeds_threshold,
            "ok": rep.ok,
        },
    }
    if prob.disc1 > 0:
        (a_p, b_p), (a_m, b_m) = lambda_pm_linearization(prob)
        payload["branch_linearization"] = {"a_plus": a_p, "b_plus": b_p,
                                           "a_minus": a_m, "b_minus": b_m}
        sets = conjugate_sets(prob)
        payload["conjugate_sets"] = {"c1": list(sets.c1), "c2": list(sets.c2),
                                     "c3": [list(c) for c in sets.c3],
                                     "balance": sets.balance}
    if rep.ok:
        count, roster = count_negative_eigenvalues(prob)
        payload["negative_count"] = count
        payload["negative_eigenvalues"] = [
            {"k": r.k, "lambda": r.lam, "lambda_other": r.lam_other}
            for r in roster]
    return payload


def cmd_verify(args) -> dict:
    spec, _ = _load(args)
    rows = []
    if spec.n == 2 and spec.is_constant:
        prob = _planar(spec)
        rep = degree_equals_negative_count(
            prob, shift=spec.perturbation_shift or None, m=args.grid_m)
        status = "PASS" if rep.all_agree else "FAIL"
        rows.append(f"i_deg={rep.homotopy_degree}, #neg={rep.negative_count}, "
                    f"balance={rep.conjugate_balance}, winding={rep.strip_winding}, "
                    f"oracle={rep.fd_count}, {status}")
        payload = {"command": "verify", **rep.to_dict(), "rows": rows}
    else:
        w = morse_via_degree(spec, steps=args.steps).total_degree
        o = morse_index(spec, m=args.grid_m)
        status = "PASS" if w == o else "FAIL"
        rows.append(f"winding={w}, oracle={o}, {status}")
        payload = {"command": "verify", "strip_winding": w, "fd_count": o,
                   "all_agree": w == o, "rows": rows}
    for row in rows:
        print(row)
    return payload


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="degindex",
        description="Degree-theoretic eigenvalue counting for vector "
                    "Sturm-Liouville operators.")
    ap.add_argument("--version", action="version", version=f"degindex {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, grid=False, path=False, strip=False):
        p.add_argument("problem", help="problem JSON file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--format", choices=["json", "csv"], default="json",
                       help="result format written to --out (default json)")
        p.add_argument("--steps", type=int, default=None,
                       help="RK4 steps for the fundamental solution "
                            "(default 2048 per unit length)")
        p.add_argument("--samples", type=int, default=64,
                       help="boundary samples per rectangle edge before "
                            "adaptive refinement (default 64)")
        p.add_argument("--threads", type=int, default=None,
                       help="thread cap for the compiled kernels")
        if grid:
            p.add_argument("--grid-m", type=int, default=None,
                           help="interior grid points for the "
                                "finite-difference check (default 400 per "
                                "unit length, clipped to [200, 1600])")
        if path:
            p.add_argument("--path-steps", type=int, default=48,
                           help="initial homotopy subdivisions (default 48)")
        if strip:
            p.add_argument("--delta", type=float, default=None,
                           help="left strip edge (default: half the first "
                                "conjugate point)")
            p.add_argument("--strip-height", type=float, default=None,
                           help="strip half-height M (default: 2x the "
                                "zero-order sup norm, at least 2)")
        return p

    p = common(sub.add_parser("degree", help="Brouwer degree over a rectangle"))
    p.add_argument("--rect", type=float, nargs=4, default=None,
                   metavar=("T0", "T1", "S0", "S1"),
                   help="rectangle bounds (default [0,1] x [-M, M])")
    p.add_argument("--localize", action="store_true",
                   help="quadrisect down to zero-carrying cells")
    p.add_argument("--trace", action="store_true", help="write trace.csv")
    p.set_defaults(fn=cmd_degree)

    p = common(sub.add_parser("morse", help="Morse index via strip winding"),
               strip=True)
    p.set_defaults(fn=cmd_morse)

    p = common(sub.add_parser("sf", help="spectral flow along t in [0, 1]"),
               grid=True, path=True)
    p.add_argument("--trace", action="store_true", help="write trajectories.csv")
    p.set_defaults(fn=cmd_sf)

    p = common(sub.add_parser("conjugates", help="conjugate-point scan"))
    p.set_defaults(fn=cmd_conjugates)

    p = common(sub.add_parser("rd-analyze",
                              help="closed forms for planar constant problems"))
    p.set_defaults(fn=cmd_rd_analyze)

    p = common(sub.add_parser("verify",
                              help="cross-check every applicable computation"),
               grid=True)
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", None):
        try:
            import numba
            numba.set_num_threads(args.threads)
        except ImportError:
            pass
    try:
        spec, _ = load_problem(args.problem)
        report = validate(spec)
        if not report.ok:
            raise ValidationError(report.violations)
        payload = args.fn(args)
    except PRECONDITION_ERRORS as exc:
        print(f"precondition violated [{exc.precondition}]: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read problem file: {exc}", file=sys.stderr)
        return 2
    except DegindexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        _write_result(Path(args.out), payload, args.format)
    else:
        json.dump(payload, sys.stdout, indent=2, sort_keys=True,
                  default=_json_default)
        print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
