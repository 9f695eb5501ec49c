"""Command-line entry point.

Exit codes: 0 success, 1 a verification check failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import synthesis
from .errors import IsingError, ParseError, ValidationError
from .evolution import COMPOSITE_TOL, UnitaryBell, classify_form, equal_up_to_phase, evolve_sequence
from .gates import teleport
from .geometry import sample_trajectory
from .model import PhysicalParams
from .states import TwoQubitState, bell_state
from .verify import SUITES, run_suites

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _load(path):
    if path is None:
        raise ValidationError("--params is required for this command")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _need(data, *keys):
    if not isinstance(data, dict):
        raise ValidationError("input must be a JSON object")
    missing = [k for k in keys if k not in data]
    if missing:
        raise ValidationError(f"missing keys: {missing}")
    return [data[k] for k in keys]


def _pulses(data):
    """Pulse list from a spec file ({"pulses": [...]}) or bare params plus "t"."""
    if isinstance(data, dict) and "pulses" in data:
        return synthesis.spec_from_dict(data)
    params = PhysicalParams.from_dict({k: data.get(k) for k in ("J", "B1", "B2", "axis")}
                                      if isinstance(data, dict) else data)
    t = float(data.get("t", 0.0))
    if t < 0:
        raise ValidationError("t must be non-negative")
    return [(params, t)]


def _matrix_from_json(rows) -> np.ndarray:
    return UnitaryBell.from_dict({"basis": "bell", "matrix": rows}).matrix


def cmd_evolve(args) -> int:
    data = _load(args.params)
    pulses = _pulses(data)
    if args.time is not None:
        if len(pulses) != 1:
            raise ValidationError("--time only applies to a single set of parameters")
        pulses = [(pulses[0][0], args.time)]
    U = evolve_sequence(pulses) if pulses else UnitaryBell(np.eye(4))
    report = U.to_dict()
    report["unitarity_error"] = U.unitarity_error()
    report["form"] = classify_form(U.matrix, args.tol).to_dict()
    status = EXIT_OK
    if isinstance(data, dict) and "expected" in data:
        ok = equal_up_to_phase(U.matrix, _matrix_from_json(data["expected"]), args.tol)
        report["matches_expected"] = bool(ok)
        status = EXIT_OK if ok else EXIT_FAIL
    _emit(_dumps(report), args.out)
    if args.trajectory:
        traj = sample_trajectory(pulses, bell_state(-1, -1), args.steps, args.projection)
        Path(args.trajectory).write_text(traj.to_csv())
    return status


def _spec_status(spec, tol) -> int:
    form = spec.verification.get("achieved_form", {})
    return EXIT_OK if form.get("kind") in ("identity_loop", "diagonal", "diag_antidiag") else EXIT_FAIL


def cmd_synth_loop(args) -> int:
    data = _load(args.params)
    J, axis = _need(data, "J", "axis")
    if data.get("search"):
        specs = synthesis.search_loop_selectors(J, int(axis), int(data.get("n_max", 8)),
                                                data.get("limit"))
        _emit(_dumps({"solutions": [s.to_dict() for s in specs]}), args.out)
        return EXIT_OK
    (sel,) = _need(data, "selectors")
    spec = synthesis.loop_one_pulse(J, int(axis), sel, data.get("assignment"))
    _emit(_dumps(spec.to_dict()), args.out)
    return _spec_status(spec, args.tol)


def cmd_synth_exchange(args) -> int:
    data = _load(args.params)
    J, axis, j = _need(data, "J", "axis", "j")
    sel = _need(data, "n_anti", "n_anti_prime", "m_diag", "n_diag")
    specs = synthesis.exchange_solutions(J, int(axis), int(j), *map(int, sel),
                                         J_prime=data.get("J_prime"), tol=args.tol)
    if data.get("all"):
        _emit(_dumps({"solutions": [s.to_dict() for s in specs]}), args.out)
    else:
        _emit(_dumps(specs[0].to_dict()), args.out)
    return EXIT_OK


def cmd_synth_form(args) -> int:
    data = _load(args.params)
    J, axis, form = _need(data, "J", "axis", "form")
    if form == "diagonal":
        T, n_plus, n_minus = _need(data, "T", "n_plus", "n_minus")
        spec, predicted = synthesis.general_diagonal(J, int(axis), float(T), int(n_plus), int(n_minus))
        ok = spec.verification["residual_predicted"] < args.tol
    elif form == "antidiagonal":
        j, t, tp = _need(data, "j", "t", "t_prime")
        spec, predicted = synthesis.general_antidiag(J, int(axis), int(j), float(t), float(tp),
                                                     data.get("J_prime"), data.get("n_diag"), args.tol)
        ok = spec.verification["residual_predicted"] < args.tol
    else:
        raise ValidationError("form must be 'diagonal' or 'antidiagonal'")
    out = spec.to_dict()
    out["predicted"] = UnitaryBell(predicted).to_dict()["matrix"]
    _emit(_dumps(out), args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_feasibility(args) -> int:
    data = _load(args.params) if args.params else {}
    A_range = data.get("A_range", [-3.0, 3.0])
    B_range = data.get("B_range", [-3.0, 3.0])
    res = int(data.get("resolution", args.steps))
    cells = []
    for branch in (1, -1):
        cells += synthesis.feasibility_map(A_range, B_range, res, branch)
    _emit(synthesis.feasibility_csv(cells), args.out)
    return EXIT_OK


def _initial_state(data) -> TwoQubitState:
    init = data.get("initial", "--") if isinstance(data, dict) else "--"
    if isinstance(init, str):
        if len(init) != 2 or any(c not in "+-" for c in init):
            raise ValidationError("initial must be a Bell label such as '--' or '+-'")
        return bell_state(*(1 if c == "+" else -1 for c in init))
    amps = np.array([complex(*z) for z in init])
    state = TwoQubitState(amps, "bell")
    state.require_normalized()
    return state


def cmd_trajectory(args) -> int:
    data = _load(args.params)
    pulses = _pulses(data)
    traj = sample_trajectory(pulses, _initial_state(data), args.steps, args.projection,
                             folded=not args.unfolded)
    _emit(traj.to_csv(), args.out)
    return EXIT_OK


def cmd_teleport(args) -> int:
    if args.params:
        a, b = _need(_load(args.params), "a", "b")
        a, b = complex(*a), complex(*b)
    else:
        rng = np.random.default_rng(args.seed)
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        a, b = v / np.linalg.norm(v)
    report = {"input": [[a.real, a.imag], [b.real, b.imag]], "outcomes": {}}
    ok = True
    for basis in ("computational", "bell"):
        outs = teleport(a, b, basis)
        report["outcomes"][basis] = {k: o.to_dict() for k, o in outs.items()}
        ok &= all(o.matches_table and o.fidelity > 1 - args.tol for o in outs.values())
    report["pass"] = bool(ok)
    _emit(_dumps(report), args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args) -> int:
    only = None if args.suite in (None, "all") else [args.suite]
    report = run_suites(args.seed, args.tol if args.tol_set else 1e-10, only)
    _emit(_dumps(report), args.out)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", help="JSON input file")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--tol", type=_positive, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--steps", type=int, default=200)
    common.add_argument("--projection", choices=("magnitude", "real"), default="magnitude")

    p = argparse.ArgumentParser(prog="bellising", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    ev = sub.add_parser("evolve", parents=[common], help="propagator of params or a spec file")
    ev.add_argument("--time", type=float, help="pulse duration (overrides 't')")
    ev.add_argument("--trajectory", help="also write a trajectory CSV from beta_00")
    ev.set_defaults(func=cmd_evolve)
    sub.add_parser("synth-loop", parents=[common], help="one-pulse evolution loop").set_defaults(func=cmd_synth_loop)
    sub.add_parser("synth-exchange", parents=[common], help="two-pulse Bell-pair exchange").set_defaults(
        func=cmd_synth_exchange)
    sub.add_parser("synth-form", parents=[common], help="general D or A form").set_defaults(func=cmd_synth_form)
    sub.add_parser("feasibility", parents=[common], help="xi-equation feasibility grid (CSV)").set_defaults(
        func=cmd_feasibility)
    tr = sub.add_parser("trajectory", parents=[common], help="chart trajectory of a pulse sequence (CSV)")
    tr.add_argument("--unfolded", action="store_true", help="keep the curve continuous outside the cube")
    tr.set_defaults(func=cmd_trajectory)
    sub.add_parser("teleport", parents=[common], help="teleportation outcome table").set_defaults(func=cmd_teleport)
    ve = sub.add_parser("verify", parents=[common], help="run the self-check suites")
    ve.add_argument("--suite", choices=("all",) + SUITES, default="all")
    ve.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.tol_set = args.tol is not None
    if args.tol is None:
        args.tol = COMPOSITE_TOL
    try:
        return args.func(args)
    except IsingError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
