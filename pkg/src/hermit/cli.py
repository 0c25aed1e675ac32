"""Command-line interface: ``hermit <command> ...``.

Exit codes: 0 success, 1 circuit not equivalent, 2 input error, 3 internal failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import bloch
from . import circuit as C
from . import io
from .bloch import Axis
from .circuit import Circuit, SynthesisReport
from .cu4 import BasisChoice, Layout, build_cu4
from .errors import InputError, SynthesisError
from .hermitian import BUILTINS, GATE_SETS, builtin, builtin_target, hermitize
from .single import two_pi_factorize

EXIT_OK, EXIT_NOT_EQUIVALENT, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


def default_tolerance() -> float:
    raw = os.environ.get("HERMIT_TOL")
    if raw is None:
        return bloch.CIRCUIT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise InputError(f"HERMIT_TOL={raw!r} is not a number") from None
    if not tol > 0 or not math.isfinite(tol):
        raise InputError("HERMIT_TOL must be a positive finite number")
    return tol


def _emit(args, payload: dict, lines: Sequence[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=1))
    else:
        print("\n".join(lines))


def _counts_text(counts: dict) -> str:
    return ", ".join(f"{k}={v}" for k, v in sorted(counts.items()) if v) or "(empty)"


def _emit_circuit(args, circ: Circuit, report: SynthesisReport, extra: Optional[dict] = None) -> int:
    if getattr(args, "out", None):
        io.save_circuit(circ, args.out)
    payload = {"circuit": io.circuit_to_dict(circ), "report": report.to_dict(), **(extra or {})}
    lines = [
        f"error: {report.error:.3e}",
        f"phase: {report.phase!r}",
        f"counts: {_counts_text(report.counts)}",
        *(f"{k}: {v}" for k, v in (extra or {}).items()),
        io.circuit_to_text(circ).rstrip("\n"),
    ]
    _emit(args, payload, lines)
    return EXIT_OK


# --------------------------------------------------------------------------- commands


def cmd_synth1q(args) -> int:
    if args.matrix:
        u = io.load_matrix(args.matrix)
        u = bloch.check_unitary(u, dim=2)
    else:
        theta, phi = args.axis
        u = bloch.rotation_matrix(args.angle, Axis.from_angles(theta, phi))
    fac = two_pi_factorize(u)
    circ = Circuit(1, (C.pi(0, fac.v1), C.pi(0, fac.v2)))
    report = SynthesisReport.for_circuit(circ, u)
    if report.error > default_tolerance():
        raise SynthesisError(f"two-pi circuit misses the input by {report.error:.3g}")
    report.phase = fac.gamma
    extra = {"axes": [[v.theta, v.phi] for v in (fac.v1, fac.v2)]}
    return _emit_circuit(args, circ, report, extra)


def _synth_cu4_one(path, layout: str, basis: str):
    v = io.load_matrix(path)
    if v.shape != (4, 4):
        raise InputError(f"{path}: expected a 4x4 matrix, got dim {v.shape[0]}")
    circ, report = build_cu4(v, layout, basis)
    if report.error > default_tolerance():
        raise SynthesisError(f"controlled-U(4) circuit error {report.error:.3g}")
    return circ, report


def cmd_synth_cu4(args) -> int:
    if args.batch:
        files = sorted(Path(args.batch).glob("*.json"))
        if not files:
            raise InputError(f"no .json matrix files in {args.batch}")
        results = []
        for f in files:
            circ, report = _synth_cu4_one(f, args.layout, args.basis)
            if args.out_dir:
                Path(args.out_dir).mkdir(parents=True, exist_ok=True)
                io.save_circuit(circ, Path(args.out_dir) / f.name)
            results.append({"file": f.name, **report.to_dict()})
        _emit(
            args,
            {"results": results},
            [f"{r['file']}: error={r['error']:.3e} {_counts_text(r['counts'])}" for r in results],
        )
        return EXIT_OK
    if not args.matrix:
        raise InputError("synth-cu4 needs --matrix FILE or --batch DIR")
    circ, report = _synth_cu4_one(args.matrix, args.layout, args.basis)
    return _emit_circuit(args, circ, report)


def cmd_verify(args) -> int:
    circ = io.load_circuit(args.circuit)
    m = io.load_matrix(args.matrix)
    if m.shape[0] != 2**circ.width:
        raise InputError(f"circuit width {circ.width} does not match matrix dim {m.shape[0]}")
    tol = args.tol if args.tol is not None else default_tolerance()
    ok, alpha, err = C.assert_equiv(circ, m, tol)
    bad = C.validate_connectivity(circ)
    verdict = ok and not bad
    _emit(
        args,
        {"equivalent": verdict, "phase": alpha, "error": err, "tol": tol, "connectivity_violations": bad},
        [
            f"equivalent: {'yes' if verdict else 'no'}",
            f"phase: {alpha!r}",
            f"error: {err:.3e} (tol {tol:g})",
            *(f"connectivity: {b}" for b in bad),
        ],
    )
    return EXIT_OK if verdict else EXIT_NOT_EQUIVALENT


def cmd_builtin(args) -> int:
    circ = builtin(args.name)
    report = SynthesisReport.for_circuit(circ, builtin_target(args.name))
    return _emit_circuit(args, circ, report, {"description": BUILTINS[args.name][1]})


def cmd_count(args) -> int:
    circ = io.load_circuit(args.circuit)
    counts = C.count_gates(circ)
    _emit(args, {"counts": counts, "width": circ.width}, [f"{k}: {v}" for k, v in counts.items()])
    return EXIT_OK


def cmd_hermitize(args) -> int:
    circ = io.load_circuit(args.circuit)
    out = hermitize(circ, args.set, ancilla=args.ancilla)
    ref = C.circuit_unitary(circ)
    if out.width > circ.width:
        ref = np.kron(ref, np.eye(2 ** (out.width - circ.width)))
    report = SynthesisReport.for_circuit(out, ref)
    return _emit_circuit(args, out, report, {"set": args.set})


def cmd_text(args) -> int:
    sys.stdout.write(io.circuit_to_text(io.load_circuit(args.circuit)))
    return EXIT_OK


# --------------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable JSON on stdout")
    parser = argparse.ArgumentParser(prog="hermit", description="Synthesis with pi-rotation (Hermitian) gates.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth1q", parents=[common], help="single-qubit unitary as two pi-rotations")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix", help="2x2 matrix JSON file")
    src.add_argument("--axis", nargs=2, type=float, metavar=("THETA", "PHI"), help="rotation axis (polar angles)")
    p.add_argument("--angle", type=float, help="rotation angle (with --axis)")
    p.add_argument("--out", help="also write the circuit JSON here")
    p.set_defaults(func=cmd_synth1q)

    p = sub.add_parser("synth-cu4", parents=[common], help="controlled two-qubit unitary on three qubits")
    p.add_argument("--matrix", help="4x4 matrix JSON file")
    p.add_argument("--layout", default="a2a", choices=[m.value for m in Layout])
    p.add_argument("--basis", default="zy", choices=[m.value for m in BasisChoice])
    p.add_argument("--batch", help="directory of matrix files to process")
    p.add_argument("--out", help="write the circuit JSON here")
    p.add_argument("--out-dir", help="with --batch: write one circuit JSON per input")
    p.set_defaults(func=cmd_synth_cu4)

    p = sub.add_parser("verify", parents=[common], help="check a circuit against a matrix up to global phase")
    p.add_argument("--circuit", required=True)
    p.add_argument("--matrix", required=True)
    p.add_argument("--tol", type=float, help="max-norm tolerance (default 1e-9 or $HERMIT_TOL)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("builtin", parents=[common], help="print a reference circuit")
    p.add_argument("name", help=", ".join(BUILTINS))
    p.add_argument("--out", help="also write the circuit JSON here")
    p.set_defaults(func=cmd_builtin)

    p = sub.add_parser("count", parents=[common], help="gate counts of a circuit file ('-' for stdin)")
    p.add_argument("--circuit", required=True)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("hermitize", parents=[common], help="rewrite a circuit into a gate set")
    p.add_argument("--circuit", required=True)
    p.add_argument("--set", required=True, help=", ".join(GATE_SETS))
    p.add_argument("--ancilla", type=int, help="wire usable as an ancilla in any state")
    p.add_argument("--out", help="also write the circuit JSON here")
    p.set_defaults(func=cmd_hermitize)

    p = sub.add_parser("text", help="plain-text listing of a circuit file")
    p.add_argument("--circuit", required=True)
    p.set_defaults(func=cmd_text)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.command == "synth1q" and args.axis is not None and args.angle is None:
        print("error: --axis needs --angle", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SynthesisError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - last-resort contract for exit code 3
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
