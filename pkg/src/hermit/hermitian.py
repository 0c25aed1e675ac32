"""Standard and Hermitian (pi-rotation) gate sets, rewriting between them, reference circuits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import bloch
from . import circuit as C
from .bloch import H_AXIS, S_AXIS, T_AXIS, X_AXIS, Z_AXIS, Axis
from .circuit import Circuit, GateOp
from .controlled import crpi_ops
from .errors import AncillaRequired, InputError, SynthesisError
from .single import euler_decompose, pi_sequence

HERMITIZE_TOL = 1e-10
_ANGLE_TOL = 1e-12
_SINGLE = (C.H, C.X, C.P, C.ROT, C.PI, C.U2)


def _same_axis(a: Axis, b: Axis, tol: float = 1e-12) -> bool:
    return abs(abs(a.dot(b)) - 1.0) <= tol


def _phase_angle(op: GateOp) -> Optional[float]:
    """lam if the op is P(lam) up to global phase (P, Rz, Z-type Pi), else None."""
    if op.kind == C.P:
        return op.lam
    if op.kind == C.ROT and _same_axis(op.axis, Z_AXIS):
        return op.lam * (1 if op.axis.z > 0 else -1)
    if op.kind == C.PI and _same_axis(op.axis, Z_AXIS):
        return math.pi
    return None


def _multiple_of(lam: float, step: float) -> bool:
    return abs(math.remainder(lam, step)) <= _ANGLE_TOL


def _pi_on(op: GateOp, axis: Axis) -> bool:
    return op.kind == C.PI and _same_axis(op.axis, axis)


def _in_xy_plane(op: GateOp) -> bool:
    return op.kind == C.PI and abs(op.axis.z) <= _ANGLE_TOL


@dataclass(frozen=True)
class GateSet:
    name: str
    member: Callable[[GateOp], bool]
    hermitian: bool
    description: str

    def __contains__(self, op: GateOp) -> bool:
        return self.member(op)

    def accepts(self, circuit: Circuit) -> bool:
        return all(self.member(op) for op in circuit.ops)

    def violations(self, circuit: Circuit) -> list[GateOp]:
        return [op for op in circuit.ops if not self.member(op)]


def _std(extra: Callable[[GateOp], bool]) -> Callable[[GateOp], bool]:
    return lambda op: op.kind == C.CNOT or extra(op)


def _cliffordt_single(op: GateOp) -> bool:
    lam = _phase_angle(op)
    return op.kind in (C.H, C.X) or (lam is not None and _multiple_of(lam, math.pi / 4))


def _clifford_single(op: GateOp) -> bool:
    lam = _phase_angle(op)
    return op.kind in (C.H, C.X) or (lam is not None and _multiple_of(lam, math.pi / 2))


GATE_SETS: dict[str, GateSet] = {
    s.name: s
    for s in (
        GateSet("Universal-U", _std(lambda op: op.kind in _SINGLE), False, "{CNOT, U}"),
        GateSet("Universal-HRz", _std(lambda op: op.kind == C.H or _phase_angle(op) is not None), False, "{CNOT, H, Rz}"),
        GateSet("CliffordT", _std(_cliffordt_single), False, "{CNOT, H, T}"),
        GateSet("Clifford", _std(_clifford_single), False, "{CNOT, H, S}"),
        GateSet("Hermitian-Pi", _std(lambda op: op.kind == C.PI), True, "{CNOT, Pi(theta, phi)}"),
        GateSet(
            "Hermitian-HPi",
            _std(lambda op: op.kind in (C.H, C.X) or _in_xy_plane(op)),
            True,
            "{CNOT, H, Pi(pi/2, phi)}",
        ),
        GateSet("Hermitian-HPiT", _std(lambda op: op.kind == C.H or _pi_on(op, T_AXIS)), True, "{CNOT, H, Pi_T}"),
        GateSet(
            "Hermitian-HPiT-X",
            _std(lambda op: op.kind in (C.H, C.X) or _pi_on(op, T_AXIS)),
            True,
            "{CNOT, H, X, Pi_T}",
        ),
        GateSet(
            "Hermitian-HPiS-X",
            _std(lambda op: op.kind in (C.H, C.X) or _pi_on(op, S_AXIS)),
            True,
            "{CNOT, H, X, Pi_S}",
        ),
    )
}


def gate_set(name: str | GateSet) -> GateSet:
    if isinstance(name, GateSet):
        return name
    try:
        return GATE_SETS[name]
    except KeyError:
        raise InputError(f"unknown gate set {name!r}; expected one of {', '.join(GATE_SETS)}") from None


# --------------------------------------------------------------------------- rewriting


def _lower_two_qubit(op: GateOp) -> list[GateOp]:
    """CNOT plus single-qubit gates for every supported two-qubit kind."""
    if op.kind == C.CNOT:
        return [op]
    if op.kind == C.CZ:
        a, b = op.qubits
        return [C.h(b), C.cnot(a, b), C.h(b)]
    if op.kind == C.SWAP:
        a, b = op.qubits
        return [C.cnot(a, b), C.cnot(b, a), C.cnot(a, b)]
    if op.kind == C.CIY:
        c, t = op.qubits
        # C-Y = S_t CX S_t^dag, and the i becomes a phase on the control
        return [C.phase(c, math.pi / 2), C.phase(t, -math.pi / 2), C.cnot(c, t), C.phase(t, math.pi / 2)]
    if len(op.controls) == 1 and (op.kind == C.MCX or C.is_controlled_pi(op)):
        axis = X_AXIS if op.kind == C.MCX else op.axis
        psi = 0.0 if op.kind == C.MCX else op.psi - math.pi / 2
        return crpi_ops(op.controls, op.target, axis, psi)
    raise InputError(f"{op!r} has no rewrite into a Hermitian set (multi-controlled gates are not decomposed)")


def _phase_lambda(u: np.ndarray) -> Optional[float]:
    if abs(u[0, 1]) <= _ANGLE_TOL and abs(u[1, 0]) <= _ANGLE_TOL:
        return float(np.angle(u[1, 1] / u[0, 0]))
    return None


def _matches(u: np.ndarray, ref: np.ndarray) -> bool:
    ok, _ = bloch.equiv_up_to_phase(ref, u, tol=_ANGLE_TOL)
    return ok


def _x_pi_for_phase(q: int, lam: float) -> list[GateOp]:
    """P(lam) as X then Pi(pi/2, phi) (or Pi then X) with phi in [0, pi/2]."""
    phi1 = (lam / 2) % math.pi
    if phi1 <= math.pi / 2:
        return [C.x(q), C.pi(q, Axis.from_angles(math.pi / 2, phi1))]
    return [C.pi(q, Axis.from_angles(math.pi / 2, math.pi - phi1)), C.x(q)]


def _quarter_turns(q: int, lam: float, step: float, axis: Axis) -> list[GateOp]:
    """P(k step) as k copies of (X, Pi_axis) or (8-k) copies of (Pi_axis, X)."""
    k = round(lam / step) % round(2 * math.pi / step)
    n = round(2 * math.pi / step)
    if k == 0:
        return []
    if k <= n - k:
        return [C.x(q), C.pi(q, axis)] * k
    return [C.pi(q, axis), C.x(q)] * (n - k)


def _rewrite_single(op: GateOp, target: GateSet) -> list[GateOp]:
    if op in target:
        return [op]
    (q,) = op.qubits
    u = op.local_matrix()
    if _matches(u, np.eye(2)):
        return []
    if _matches(u, bloch.H):
        return [C.h(q)]
    if _matches(u, bloch.X):
        return [C.x(q)]
    lam = _phase_lambda(u)
    if target.name == "Hermitian-Pi":
        # X stays an X kind until pair cancellation; see _as_pi
        return _x_pi_for_phase(q, lam) if lam is not None else [C.pi(q, v) for v in pi_sequence(u)]
    if target.name == "Hermitian-HPi":
        if lam is not None:
            return _x_pi_for_phase(q, lam)
        # u = Rz(a) Ry(b) Rz(c) = Rz(a + pi/2) H Rz(b) H Rz(c - pi/2)
        a, b, c = euler_decompose(u, "ZYZ").angles
        out = []
        for item in (c - math.pi / 2, "H", b, "H", a + math.pi / 2):
            out += [C.h(q)] if item == "H" else _x_pi_for_phase(q, item)
        return out
    if target.name in ("Hermitian-HPiT", "Hermitian-HPiT-X") and lam is not None and _multiple_of(lam, math.pi / 4):
        return _quarter_turns(q, lam, math.pi / 4, T_AXIS)
    if target.name == "Hermitian-HPiS-X" and lam is not None and _multiple_of(lam, math.pi / 2):
        return _quarter_turns(q, lam, math.pi / 2, S_AXIS)
    raise InputError(f"{op!r} is not expressible in {target.name}")


def _as_pi(op: GateOp) -> GateOp:
    if op.kind == C.X:
        return C.pi(op.qubits[0], X_AXIS)
    if op.kind == C.H:
        return C.pi(op.qubits[0], H_AXIS)
    return op


def _is_self_inverse_pair(a: GateOp, b: GateOp) -> bool:
    if a.qubits != b.qubits or len(a.qubits) != 1:
        return False
    if a.kind in (C.H, C.X) and a.kind == b.kind:
        return True
    return a.kind == C.PI and b.kind == C.PI and _same_axis(a.axis, b.axis)


def _cancel_adjacent(ops: list[GateOp]) -> list[GateOp]:
    """Remove pairs of equal self-inverse gates with nothing between them on their wire."""
    changed = True
    while changed:
        changed = False
        last: dict[int, int] = {}
        for i, op in enumerate(ops):
            for q in op.qubits:
                j = last.get(q)
                if j is not None and _is_self_inverse_pair(ops[j], op):
                    ops = ops[:j] + ops[j + 1 : i] + ops[i + 1 :]
                    changed = True
                    break
            if changed:
                break
            for q in op.qubits:
                last[q] = i
    return ops


def cancel_x_pairs(ops: list[GateOp]) -> list[GateOp]:
    """Drop X pairs on a wire when everything between them only uses the wire as a CNOT target."""
    ops = list(ops)
    changed = True
    while changed:
        changed = False
        for i, op in enumerate(ops):
            if op.kind != C.X:
                continue
            (q,) = op.qubits
            for j in range(i + 1, len(ops)):
                other = ops[j]
                if q not in other.qubits:
                    continue
                if other.kind == C.X:
                    ops = ops[:i] + ops[i + 1 : j] + ops[j + 1 :]
                    changed = True
                elif other.kind == C.CNOT and other.target == q:
                    continue
                break
            if changed:
                break
    return _cancel_adjacent(ops)


def x_via_ancilla(q: int, a: int, style: str = "pit") -> list[GateOp]:
    """X on q using only CNOTs and Pi_T (style 'pit') or H (style 'h'); ancilla a is untouched."""
    if style == "pit":
        return [C.cnot(a, q), C.pi(a, T_AXIS), C.cnot(a, q), C.pi(a, T_AXIS)]
    if style == "h":
        return [C.cnot(a, q), C.h(q), C.cnot(q, a), C.h(q), C.cnot(a, q), C.h(q), C.cnot(q, a), C.h(q)]
    raise InputError(f"unknown ancilla style {style!r}")


def hermitize(circuit: Circuit, target: str | GateSet, ancilla: Optional[int] = None) -> Circuit:
    """Rewrite ``circuit`` so every gate belongs to ``target``.

    ``ancilla`` names a wire usable in any state (it may equal ``circuit.width``
    to add one); it is only needed when the target set lacks X and some X gate
    survives cancellation.  Raises AncillaRequired otherwise.
    """
    gs = gate_set(target)
    if ancilla is None and circuit.ancillas:
        ancilla = circuit.ancillas[0]
    ops: list[GateOp] = []
    for op in circuit.ops:
        for low in _lower_two_qubit(op) if len(op.qubits) > 1 else [op]:
            ops += _rewrite_single(low, gs) if len(low.qubits) == 1 else [low]
    ops = cancel_x_pairs(ops)
    if gs.name == "Hermitian-Pi":
        ops = [_as_pi(op) for op in ops]
    width = circuit.width
    ancillas = circuit.ancillas
    leftover = [op for op in ops if op not in gs]
    if leftover:
        if any(op.kind != C.X for op in leftover) or gs.name != "Hermitian-HPiT":
            raise SynthesisError(f"rewrite left gates outside {gs.name}: {leftover}")
        if ancilla is None:
            raise AncillaRequired(f"{len(leftover)} X gate(s) remain; {gs.name} needs an ancilla wire for them")
        if not 0 <= ancilla <= width or any(ancilla in op.qubits for op in circuit.ops):
            raise InputError(f"ancilla {ancilla} must be an idle wire or the next new wire")
        width = max(width, ancilla + 1)
        ancillas = tuple(sorted(set(ancillas) | {ancilla}))
        ops = [g for op in ops for g in (x_via_ancilla(op.qubits[0], ancilla) if op.kind == C.X else [op])]
    out = Circuit(width, tuple(ops), circuit.connectivity, ancillas)
    _verify(circuit, out)
    return out


def _verify(source: Circuit, result: Circuit) -> None:
    if result.width > 10:
        return
    ref = C.circuit_unitary(source)
    if result.width > source.width:
        ref = np.kron(ref, np.eye(2 ** (result.width - source.width)))
    ok, _, err = C.assert_equiv(result, ref, HERMITIZE_TOL)
    if not ok:
        raise SynthesisError(f"hermitized circuit deviates by {err:.3g}")


# --------------------------------------------------------------------------- reference circuits


def _toffoli_hermitian_cliffordt() -> Circuit:
    t, c1, c2 = 0, 1, 2
    pt = lambda q: C.pi(q, T_AXIS)  # noqa: E731
    ops = [
        C.h(t), C.cnot(c1, c2),
        C.cnot(t, c1),
        pt(c1), pt(c2),
        C.cnot(t, c1),
        C.cnot(t, c2),
        C.x(t), pt(c1), pt(c2),
        C.cnot(c1, c2),
        pt(t), pt(c2),
        C.cnot(t, c2),
        C.h(t), pt(c2),
    ]  # fmt: skip
    return Circuit(3, tuple(ops))


def _toffoli_minimal() -> Circuit:
    c1, c2, t = 0, 1, 2
    pt = lambda q: C.pi(q, T_AXIS)  # noqa: E731
    ops = [
        C.h(t),
        C.cnot(c2, t),
        C.cnot(c1, c2),
        pt(c2), pt(t),
        C.cnot(c1, c2),
        C.cnot(t, c1),
        pt(c1), pt(c2),
        C.cnot(c2, c1),
        C.cnot(c2, t),
        pt(c1), pt(t),
        C.cnot(t, c1),
        pt(c1), C.h(t),
    ]  # fmt: skip
    return Circuit(3, tuple(ops))


def toffoli_cliffordt() -> Circuit:
    """The textbook seven-T Toffoli on wires (t, c1, c2) = (0, 1, 2)."""
    t, c1, c2 = 0, 1, 2
    tg = lambda q: C.phase(q, math.pi / 4)  # noqa: E731
    td = lambda q: C.phase(q, -math.pi / 4)  # noqa: E731
    ops = [
        C.h(t), C.cnot(c1, c2),
        C.cnot(t, c1),
        td(c1), td(c2),
        C.cnot(t, c1),
        C.cnot(t, c2),
        tg(c1), tg(c2),
        C.cnot(c1, c2),
        tg(t), td(c2),
        C.cnot(t, c2),
        C.h(t), tg(c2),
    ]  # fmt: skip
    return Circuit(3, tuple(ops))


BUILTINS: dict[str, tuple[Callable[[], Circuit], str]] = {
    "toffoli_hermitian_cliffordT": (_toffoli_hermitian_cliffordt, "Toffoli over {CNOT, H, X, Pi_T}; wires (t, c1, c2)"),
    "toffoli_minimal_hermitian": (_toffoli_minimal, "Toffoli over {CNOT, H, Pi_T}; wires (c1, c2, t)"),
    "x_via_ancilla_cnot_pit": (
        lambda: Circuit(2, tuple(x_via_ancilla(0, 1, "pit")), ancillas=(1,)),
        "X on wire 0 from CNOT and Pi_T; wire 1 is an ancilla in any state",
    ),
    "x_via_ancilla_cnot_h": (
        lambda: Circuit(2, tuple(x_via_ancilla(0, 1, "h")), ancillas=(1,)),
        "X on wire 0 from CNOT and H; wire 1 is an ancilla in any state",
    ),
}


def builtin_target(name: str) -> np.ndarray:
    """Matrix each built-in circuit implements (up to global phase)."""
    if name == "toffoli_hermitian_cliffordT":
        return C.embed(C.controlled(bloch.X, 2), (1, 2, 0), 3)
    if name == "toffoli_minimal_hermitian":
        return C.controlled(bloch.X, 2)
    if name in ("x_via_ancilla_cnot_pit", "x_via_ancilla_cnot_h"):
        return np.kron(bloch.X, bloch.I2)
    raise InputError(f"unknown builtin {name!r}; expected one of {', '.join(BUILTINS)}")


def builtin(name: str) -> Circuit:
    """Reference circuit by name; each is checked against its target before returning."""
    if name not in BUILTINS:
        raise InputError(f"unknown builtin {name!r}; expected one of {', '.join(BUILTINS)}")
    circ = BUILTINS[name][0]()
    ok, _, err = C.assert_equiv(circ, builtin_target(name))
    if not ok:
        raise SynthesisError(f"builtin {name} deviates from its target by {err:.3g}")
    return circ
