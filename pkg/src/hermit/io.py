"""JSON files for matrices and circuits, and a plain-text circuit listing.

Matrix file::

    {"dim": 4, "entries": [[re, im], ...]}          # dim*dim entries, row-major

Circuit file::

    {"width": 3, "connectivity": "all", "ancillas": [],
     "ops": [{"kind": "Pi", "qubits": [0], "params": {"axis": [x, y, z]}}, ...]}

Floats are written with ``repr`` so a dump/load round trip is bit-exact.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path
from typing import Any

import numpy as np

from . import bloch
from . import circuit as C
from .bloch import Axis
from .circuit import Circuit, GateOp
from .errors import InputError


def _complex_pair(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _parse_complex(item, where: str) -> complex:
    if isinstance(item, (int, float)) and not isinstance(item, bool):
        return complex(item)
    if isinstance(item, (list, tuple)) and len(item) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in item
    ):
        return complex(item[0], item[1])
    raise InputError(f"{where}: expected [re, im], got {item!r}")


# --------------------------------------------------------------------------- matrices


def matrix_to_dict(m) -> dict:
    a = np.asarray(m, dtype=complex)
    return {"dim": int(a.shape[0]), "entries": [_complex_pair(z) for z in a.reshape(-1)]}


def matrix_from_dict(data: Any, check: bool = True) -> np.ndarray:
    if not isinstance(data, dict) or "dim" not in data or "entries" not in data:
        raise InputError('matrix file needs "dim" and "entries"')
    dim = data["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise InputError(f"dim must be a positive integer, got {dim!r}")
    entries = data["entries"]
    if not isinstance(entries, list) or len(entries) != dim * dim:
        raise InputError(f"expected {dim * dim} entries for dim {dim}")
    m = np.array([_parse_complex(e, f"entry {k}") for k, e in enumerate(entries)]).reshape(dim, dim)
    return bloch.check_unitary(m) if check else m


# --------------------------------------------------------------------------- circuits


def op_to_dict(op: GateOp) -> dict:
    params: dict[str, Any] = {}
    if op.lam is not None:
        params["lambda"] = op.lam
    if op.axis is not None:
        params["axis"] = [op.axis.x, op.axis.y, op.axis.z]
    if op.psi is not None:
        params["psi"] = op.psi
    if op.matrix is not None:
        params["matrix"] = [[_complex_pair(z) for z in row] for row in op.matrix]
    return {"kind": op.kind, "qubits": list(op.qubits), "params": params}


def _number(params: dict, key: str, where: str) -> float:
    value = params[key]
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
        raise InputError(f"{where}: {key} must be a finite number")
    return float(value)


def _axis(params: dict, where: str) -> Axis:
    if "axis" in params:
        vec = params["axis"]
        if not isinstance(vec, list) or len(vec) != 3:
            raise InputError(f"{where}: axis must be [x, y, z]")
        try:
            return bloch.as_axis([float(x) for x in vec])
        except (TypeError, ValueError) as exc:
            raise InputError(f"{where}: {exc}") from None
    if "theta" in params and "phi" in params:
        return Axis.from_angles(_number(params, "theta", where), _number(params, "phi", where))
    raise InputError(f"{where}: missing axis (give 'axis' or 'theta' and 'phi')")


def op_from_dict(data: Any, index: int = 0) -> GateOp:
    where = f"op {index}"
    if not isinstance(data, dict) or "kind" not in data or "qubits" not in data:
        raise InputError(f'{where}: needs "kind" and "qubits"')
    kind, qubits = data["kind"], data["qubits"]
    params = data.get("params") or {}
    if kind not in C.KINDS:
        raise InputError(f"{where}: unknown kind {kind!r}; expected one of {', '.join(C.KINDS)}")
    if not isinstance(qubits, list) or not all(isinstance(q, int) and not isinstance(q, bool) for q in qubits):
        raise InputError(f"{where}: qubits must be a list of integers")
    if not isinstance(params, dict):
        raise InputError(f"{where}: params must be an object")
    kw: dict[str, Any] = {}
    if kind in (C.P, C.ROT, C.MCROT):
        if "lambda" not in params:
            raise InputError(f"{where}: {kind} needs params.lambda")
        kw["lam"] = _number(params, "lambda", where)
    if kind in (C.ROT, C.PI, C.MCROT):
        kw["axis"] = _axis(params, where)
    if kind == C.MCROT:
        kw["psi"] = _number(params, "psi", where) if "psi" in params else 0.0
    if kind == C.U2:
        rows = params.get("matrix")
        if not isinstance(rows, list) or len(rows) != 2 or any(not isinstance(r, list) or len(r) != 2 for r in rows):
            raise InputError(f"{where}: U2 needs a 2x2 params.matrix of [re, im] pairs")
        kw["matrix"] = tuple(tuple(_parse_complex(z, where) for z in row) for row in rows)
    return GateOp(kind, tuple(qubits), **kw)


def circuit_to_dict(c: Circuit) -> dict:
    out = {"width": c.width, "connectivity": c.connectivity, "ops": [op_to_dict(op) for op in c.ops]}
    if c.ancillas:
        out["ancillas"] = list(c.ancillas)
    return out


def circuit_from_dict(data: Any) -> Circuit:
    """Parse a circuit object; a ``{"circuit": ...}`` wrapper (command output) is accepted too."""
    if isinstance(data, dict) and "circuit" in data and "ops" not in data:
        data = data["circuit"]
    if not isinstance(data, dict) or "width" not in data or "ops" not in data:
        raise InputError('circuit file needs "width" and "ops"')
    width = data["width"]
    if not isinstance(width, int) or isinstance(width, bool):
        raise InputError("width must be an integer")
    if width > C.MAX_WIDTH:
        raise InputError(f"width {width} exceeds the supported maximum of {C.MAX_WIDTH}")
    if not isinstance(data["ops"], list):
        raise InputError("ops must be a list")
    ops = tuple(op_from_dict(op, k) for k, op in enumerate(data["ops"]))
    return Circuit(width, ops, data.get("connectivity", "all"), tuple(data.get("ancillas", ())))


# --------------------------------------------------------------------------- files


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=1)


def read_json(path: str | Path) -> Any:
    """Load JSON from a file, or from stdin when path is '-'."""
    try:
        text = sys.stdin.read() if str(path) == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def load_matrix(path: str | Path) -> np.ndarray:
    return matrix_from_dict(read_json(path))


def load_circuit(path: str | Path) -> Circuit:
    return circuit_from_dict(read_json(path))


def save_circuit(c: Circuit, path: str | Path) -> None:
    Path(path).write_text(dumps(circuit_to_dict(c)) + "\n")


def save_matrix(m, path: str | Path) -> None:
    Path(path).write_text(dumps(matrix_to_dict(m)) + "\n")


# --------------------------------------------------------------------------- text


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def op_to_text(op: GateOp) -> str:
    """Gate name in the usual notation followed by its wires (controls first)."""
    wires = " ".join(f"q{q}" for q in op.qubits)
    if op.kind == C.PI:
        name = f"Pi({_fmt(op.axis.theta)},{_fmt(op.axis.phi)})"
    elif op.kind == C.P:
        name = f"P({_fmt(op.lam)})"
    elif op.kind == C.ROT:
        a = op.axis
        name = f"R({_fmt(op.lam)};{_fmt(a.x)},{_fmt(a.y)},{_fmt(a.z)})"
    elif op.kind == C.MCROT:
        a = op.axis
        name = f"McRot({_fmt(op.lam)};{_fmt(a.x)},{_fmt(a.y)},{_fmt(a.z)};psi={_fmt(op.psi or 0.0)})"
    elif op.kind == C.U2:
        flat = [complex(z) for row in op.matrix for z in row]
        name = "U[" + ",".join(f"{_fmt(z.real)}{z.imag:+.12g}j" for z in flat) + "]"
    else:
        name = op.kind
    return f"{name} {wires}"


def circuit_to_text(c: Circuit) -> str:
    """One gate per line in time order, preceded by a header line."""
    head = f"# width={c.width} connectivity={c.connectivity}"
    if c.ancillas:
        head += " ancillas=" + ",".join(str(a) for a in c.ancillas)
    return "\n".join([head, *(op_to_text(op) for op in c.ops)]) + "\n"
