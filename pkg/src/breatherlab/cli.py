"""Command-line front door.

Subcommands construct solutions, evolve them with diagnostics, run Floquet
analysis, and apply conditional-density-matrix operations.  Structured
artifacts are JSON, time series are CSV.  Exit codes: 0 success,
1 validation error, 2 numerical failure; failures print one
``error: ...`` line on stderr.  Output is byte-deterministic for
identical invocations.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import dynamics, elliptic, fluctuation, lindstedt, qcond
from .errors import NumericalError, ValidationError


def _write_json(obj, path: str):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="breatherlab",
        description="Doubly-periodic nonlinear Klein-Gordon field toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lindstedt", help="construct a standing-wave solution")
    p.add_argument("--modes", type=int, default=4, help="retained odd harmonics (default 4)")
    p.add_argument("--epsilon", type=float, required=True, help="expansion parameter")
    p.add_argument("--amplitude", type=float, default=1.0, help="fundamental amplitude a1 (default 1)")
    p.add_argument("--mass", type=float, default=0.0, help="field mass; 0 = resonant case (default 0)")
    p.add_argument("--tol", type=float, default=1e-12, help="resonance tolerance (default 1e-12)")
    p.add_argument("--out", required=True, help="output JSON path")

    p = sub.add_parser("twave", help="fit a traveling-wave profile")
    p.add_argument("--mass", type=float, default=0.0, help="field mass (default 0)")
    p.add_argument("--epsilon", type=float, required=True, help="cubic coupling")
    p.add_argument("--velocity", type=float, required=True, help="wave velocity")
    p.add_argument("--harmonic", type=int, default=1, help="spatial period 2*pi/harmonic (default 1)")
    p.add_argument("--out", required=True, help="output JSON path")

    p = sub.add_parser("evolve", help="evolve an initial condition with diagnostics")
    p.add_argument("--init", required=True, help="solution/profile/state JSON")
    p.add_argument("--dt", type=float, default=1e-3, help="time step (default 1e-3)")
    p.add_argument("--steps", type=int, required=True, help="number of steps")
    p.add_argument("--record-every", type=int, default=100, help="recording stride (default 100)")
    p.add_argument("--grid", type=int, default=128, help="grid points when sampling a solution (default 128)")
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("floquet", help="monodromy analysis of a background")
    p.add_argument("--background", required=True, help="solution or profile JSON")
    p.add_argument("--modes", type=int, default=32, help="retained spatial modes (default 32)")
    p.add_argument("--dt", type=float, default=1e-3, help="target step (adjusted to tile the period)")
    p.add_argument("--out", required=True, help="output JSON path")

    p = sub.add_parser("qcond", help="conditional density matrix of subsystem 1")
    p.add_argument("--state", required=True, help="density matrix JSON")
    p.add_argument("--projector", required=True, help="projector JSON (dimension d2)")
    p.add_argument("--d1", type=int, required=True, help="subsystem-1 dimension")
    p.add_argument("--d2", type=int, required=True, help="subsystem-2 dimension")
    p.add_argument("--observable", default=None, help="optional Hermitian observable JSON (dimension d1)")
    p.add_argument("--out", required=True, help="output JSON path")
    return parser


def _load_initial_state(path: str, grid_n: int):
    obj = _load_json(path)
    if "orders" in obj:
        sol = lindstedt.solution_from_dict(obj)
        return dynamics.state_from_solution(sol, grid_n)
    if "beta" in obj and "A" in obj:
        profile = elliptic.profile_from_dict(obj)
        return dynamics.state_from_profile(profile, grid_n)
    if "phi" in obj:
        return dynamics.state_from_dict(obj)
    raise ValidationError(f"{path} is not a recognized initial-condition artifact")


def _load_background(path: str) -> fluctuation.Background:
    obj = _load_json(path)
    if "orders" in obj:
        return fluctuation.Background(source=lindstedt.solution_from_dict(obj))
    if "beta" in obj and "A" in obj:
        return fluctuation.Background(source=elliptic.profile_from_dict(obj))
    raise ValidationError(f"{path} is not a recognized background artifact")


def _run_lindstedt(args) -> int:
    if args.mass == 0.0:
        problem = lindstedt.ResonanceProblem(
            n_modes=args.modes, normalization="fix_a1",
            norm_value=args.amplitude, tol=args.tol,
        )
        a, w1 = lindstedt.solve_resonance_system(problem)
        sol = lindstedt.build_solution(a, w1, args.epsilon, args.tol)
    else:
        sol = lindstedt.build_nonresonant_solution(
            args.amplitude, args.mass, args.epsilon, tol=max(args.tol, 1e-12)
        )
    _write_json(lindstedt.solution_to_dict(sol), args.out)
    return 0


def _run_twave(args) -> int:
    profile = elliptic.fit_periodic_wave(args.mass, args.epsilon, args.velocity, args.harmonic)
    _write_json(elliptic.profile_to_dict(profile), args.out)
    return 0


def _run_evolve(args) -> int:
    state = _load_initial_state(args.init, args.grid)
    records, _ = dynamics.evolve_with_diagnostics(state, args.dt, args.steps, args.record_every)
    with open(args.out, "w") as fh:
        dynamics.diagnostics_to_csv(records, fh)
    return 0


def _run_floquet(args) -> int:
    bg = _load_background(args.background)
    report = fluctuation.monodromy(bg, args.modes, args.dt)
    _write_json(fluctuation.report_to_dict(report), args.out)
    return 0


def _run_qcond(args) -> int:
    dims = qcond.BipartiteDims(d1=args.d1, d2=args.d2)
    rho = qcond.matrix_from_dict(_load_json(args.state))
    proj = qcond.matrix_from_dict(_load_json(args.projector))
    if not qcond.is_projector(proj):
        raise ValidationError("projector file does not hold a projector")
    prob = qcond.conditional_probability(rho, proj, dims)
    conditional = qcond.conditional_density(rho, proj, dims)
    out = {
        "probability": prob,
        "conditional": qcond.matrix_to_dict(conditional.entries),
    }
    if args.observable is not None:
        f = qcond.matrix_from_dict(_load_json(args.observable))
        out["expectation"] = qcond.conditional_expectation(rho, f, proj, dims)
    _write_json(out, args.out)
    return 0


_RUNNERS = {
    "lindstedt": _run_lindstedt,
    "twave": _run_twave,
    "evolve": _run_evolve,
    "floquet": _run_floquet,
    "qcond": _run_qcond,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help, 2 for bad flags; bad flags are
        # validation errors here.
        return 0 if exc.code in (0, None) else 1
    try:
        return _RUNNERS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except np.linalg.LinAlgError as exc:
        print(f"error: linear algebra failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
