"""Command line front end.

Four subcommands over operator files: ``spectrum`` (sphere report, both
routes, classification), ``scan`` (sigma_min grid as CSV), ``verify``
(identity and containment checks with a pass/fail summary), and ``trend``
(sigma_min across truncation sizes).  Exit codes: 0 success, 1 verification
failure, 2 input error.  Reports are byte-stable for a fixed config: keys
are sorted, floats use their shortest round-trip decimal form, and all
randomness flows from the single seed.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import gallery, spectral
from .numerics import NumericsError, sigma_max
from .qmat import complex_adjoint, qmatrix_from_dict
from .quat import Quaternion, UnitQuaternion
from .spectral import SpectrumMismatch

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_INPUT = 2


def _write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _parse_floats(text: str, count: int, what: str) -> list[float]:
    parts = [p for p in text.split(",") if p.strip() != ""]
    if len(parts) != count:
        raise ValueError(f"{what} needs {count} comma-separated values, got {len(parts)}")
    return [float(p) for p in parts]


def _parse_ints(text: str, what: str, count: int | None = None) -> list[int]:
    parts = [p for p in text.split(",") if p.strip() != ""]
    if count is not None and len(parts) != count:
        raise ValueError(f"{what} needs {count} comma-separated values, got {len(parts)}")
    return [int(p) for p in parts]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qspectra",
        description="spectra of quaternionic operators: sphere reports, "
                    "slice scans, identity verification, truncation trends",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, figure=True):
        p.add_argument("--input", required=True, help="operator file (JSON)")
        p.add_argument("--output", required=True, help="output file to write")
        p.add_argument("--tol", type=float, default=spectral.DEFAULT_TOL,
                       help="membership tolerance (scaled by max(1, ||T||))")
        p.add_argument("--seed", type=int, default=42,
                       help="seed for all sampling (default 42)")
        if figure:
            p.add_argument("--figure", default=None,
                           help="also render a figure (PNG/PDF) to this path")

    p = sub.add_parser("spectrum", help="sphere report via both routes")
    common(p)

    p = sub.add_parser("scan", help="sigma_min grid over the half-slice, CSV")
    common(p)
    p.add_argument("--window", default=None,
                   help="x0,x1,y0,y1 (default: norm ball padded by 25%%)")
    p.add_argument("--res", default="64,64", help="W,H grid resolution")

    p = sub.add_parser("verify", help="identity and containment checks")
    common(p, figure=False)
    p.add_argument("--trials", type=int, default=100,
                   help="random trials per identity check")

    p = sub.add_parser("trend", help="sigma_min across truncation sizes")
    common(p)
    p.add_argument("--sizes", default="64,128,256", help="n1,n2,... truncation sizes")

    return ap


def _load_matrix_input(path):
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if isinstance(obj, dict) and "kind" in obj:
        return gallery.materialize(gallery.OperatorSpec.from_dict(obj))
    return qmatrix_from_dict(obj)


def _cmd_spectrum(args) -> int:
    T = _load_matrix_input(args.input)
    report = spectral.right_spectrum(T, tol=args.tol, seed=args.seed)
    report = spectral.classify_parts_finite(T, report)
    _write_json(report.to_dict(), args.output)
    if args.figure:
        from . import figures

        figures.render_spectrum(report, args.figure)
    return EXIT_OK


def _cmd_scan(args) -> int:
    T = _load_matrix_input(args.input)
    res = _parse_ints(args.res, "--res", 2)
    if args.window is not None:
        window = _parse_floats(args.window, 4, "--window")
    else:
        b = 1.25 * max(1.0, sigma_max(complex_adjoint(T).m).value)
        window = [-b, b, 0.0, b]
    grid = spectral.slice_scan(T, window, res)
    grid.to_csv(args.output)
    if args.figure:
        from . import figures

        figures.render_scan(grid, args.figure)
    return EXIT_OK


def _cmd_verify(args) -> int:
    T = _load_matrix_input(args.input)
    rng = np.random.default_rng(args.seed)
    summary = {"seed": int(args.seed), "tol": float(args.tol),
               "trials": int(args.trials), "checks": {}}

    report = spectral.right_spectrum(T, tol=args.tol, seed=args.seed)
    summary["spectrum"] = report.to_dict()

    worst_fact = 0.0
    worst_slide = 0.0
    for _ in range(args.trials):
        lam = Quaternion.from_array(rng.normal(size=4))
        worst_fact = max(worst_fact, spectral.verify_factorization(
            T, lam, trials=1, seed=int(rng.integers(2**63))))
        x = rng.normal(size=(T.n, 4))
        q = UnitQuaternion(Quaternion.from_array(rng.normal(size=4)))
        worst_slide = max(worst_slide, spectral.verify_slide_identity(
            T, x, Quaternion.from_array(rng.normal(size=4)), q))

    circ = spectral.verify_circularity(T, report, samples_per_sphere=10,
                                       tol=args.tol, seed=args.seed + 1)
    ball = spectral.verify_ball_containment(T, report)

    summary["checks"]["factorization"] = {
        "max_relative_residual": float(worst_fact), "bound": 1e-10,
        "passed": bool(worst_fact <= 1e-10),
    }
    summary["checks"]["slide_identity"] = {
        "max_relative_residual": float(worst_slide), "bound": 1e-12,
        "passed": bool(worst_slide <= 1e-12),
    }
    summary["checks"]["circularity"] = circ.to_dict()
    summary["checks"]["ball_containment"] = ball.to_dict()
    summary["passed"] = all(c["passed"] for c in summary["checks"].values())

    _write_json(summary, args.output)
    return EXIT_OK if summary["passed"] else EXIT_VERIFICATION


def _cmd_trend(args) -> int:
    spec, lam = gallery.load_operator_spec(args.input)
    if lam is None:
        raise ValueError("trend input needs a 'lambda' field ([a0,a1,a2,a3])")
    sizes = _parse_ints(args.sizes, "--sizes")
    report = gallery.trend(spec, lam, sizes)
    _write_json(report.to_dict(), args.output)
    if args.figure:
        from . import figures

        figures.render_trend(report, args.figure)
    return EXIT_OK


_COMMANDS = {
    "spectrum": _cmd_spectrum,
    "scan": _cmd_scan,
    "verify": _cmd_verify,
    "trend": _cmd_trend,
}


def run(args) -> int:
    try:
        return _COMMANDS[args.command](args)
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON in input: {exc.msg} "
              f"(line {exc.lineno}, column {exc.colno})", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SpectrumMismatch as exc:
        print("error: spectrum routes disagree, witness follows", file=sys.stderr)
        print(json.dumps(exc.to_dict(), sort_keys=True, indent=2), file=sys.stderr)
        return EXIT_VERIFICATION
    except (ValueError, NumericsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
